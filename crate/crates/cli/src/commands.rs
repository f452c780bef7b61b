use mnqc::bench::{
    analytic_boundary, build_benchmark, gap_scan, link_frontier, log_space, quantum_volume,
    route, simulate_noisy, FrontierPoint, NodeTopology,
};
use mnqc::densmat::{BellState, NoiseParams};
use mnqc::distillation::{nested_distillation, DistillationConfig};
use mnqc::dqpe::{self, DepthVariant, DqpeCostQuery, Estimator};
use mnqc::internode::{effective_link_channel, link_from_preset, teleported_cx, LinkRecord};
use mnqc::physical::{
    simulate_heralded_cycle, sweep_excitation_probability, sweep_pump_power, M2OSweepRow,
    SimulationOptions,
};
use mnqc::qcpa::{self, KnittingBound, QcpaQuery};
use mnqc::roofline::{self, RooflineMachine};
use mnqc::MnqcError;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{Analysis, Axis, ProfileSource, RunConfig};
use crate::error::CliError;
use crate::output::Output;

type Res = Result<(), CliError>;

const DEVICE_QUBITS: usize = 10;

fn axis(a: Axis) -> Result<Vec<f64>, CliError> {
    Ok(log_space(a.lo, a.hi, a.n)?)
}

pub fn m2o_sweep(cfg: &RunConfig, out: &mut Output) -> Res {
    let preset = cfg.preset()?;
    let opts = SimulationOptions::default();
    let results = if cfg.m2o.powers.is_empty() {
        sweep_excitation_probability(&preset, &cfg.m2o.pes, &opts)?
    } else {
        sweep_pump_power(&preset, &cfg.m2o.powers, cfg.pe, &opts)?
    };
    let rows: Vec<M2OSweepRow> = results.iter().map(M2OSweepRow::from).collect();
    out.csv("m2o_sweep.csv", &rows)
}

pub fn distill(cfg: &RunConfig, out: &mut Output) -> Res {
    let preset = cfg.preset()?;
    let ep = simulate_heralded_cycle(
        &preset,
        cfg.pump.watts(&preset),
        cfg.pe,
        &SimulationOptions::default(),
    )?;
    let raw = ep.conditional_state.ok_or(MnqcError::NoHeraldEvent)?;
    let config = DistillationConfig::new(cfg.rounds, 1.0 / ep.rate, cfg.noise);
    let res = nested_distillation(&raw, &config)?;
    out.result("final_fidelity", &res.fidelity());
    out.csv("distill.csv", &res.trajectory)
}

#[derive(Serialize)]
pub struct GateReport {
    #[serde(flatten)]
    pub link: LinkRecord,
    ep_fidelity: f64,
    perfect_ep: bool,
}

pub fn pipeline_link(cfg: &RunConfig) -> Result<GateReport, CliError> {
    let preset = cfg.preset()?;
    let (link, gate) = link_from_preset(
        &preset,
        cfg.pump.watts(&preset),
        cfg.pe,
        cfg.rounds,
        &cfg.noise,
        &SimulationOptions::default(),
    )?;
    Ok(GateReport { link, ep_fidelity: gate.ep_fidelity, perfect_ep: false })
}

/// With `perfect_ep` the EP is an exact Bell pair and local operations are
/// noiseless, which must reproduce CX exactly.
pub fn gate(cfg: &RunConfig, perfect_ep: bool, out: &mut Output) -> Res {
    let report = if perfect_ep {
        let g = teleported_cx(
            &BellState::PsiPlus.density(),
            BellState::PsiPlus,
            &NoiseParams::noiseless(),
            0.0,
        )?;
        GateReport {
            link: LinkRecord {
                pe: cfg.pe,
                pump_watts: 0.0,
                rounds: 0,
                t_ll_seconds: g.gate_time,
                f_ll: g.process_fidelity,
            },
            ep_fidelity: g.ep_fidelity,
            perfect_ep: true,
        }
    } else {
        pipeline_link(cfg)?
    };
    out.result("f_ll", &report.link.f_ll);
    out.result("t_ll_seconds", &report.link.t_ll_seconds);
    out.json("gate.json", &report)
}

#[derive(Serialize)]
struct GapSummary<'a> {
    benchmark: &'a str,
    down_closed: bool,
    frontier_reaches_success: bool,
    best_frontier_point: Option<FrontierPoint>,
    best_frontier_score: Option<f64>,
}

pub fn gap(cfg: &RunConfig, frontier: Option<Vec<FrontierPoint>>, out: &mut Output) -> Res {
    let g = &cfg.gap;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let circuit = build_benchmark(&g.benchmark, DEVICE_QUBITS, &mut rng)?;
    let routed = route(&circuit, &NodeTopology::two_rings())?;
    let mut grid = gap_scan(&routed, &axis(g.times)?, &axis(g.infidelities)?, &cfg.noise, g.threshold)?;
    grid.frontier = match frontier {
        Some(f) => f,
        None if g.frontier_pes.is_empty() => Vec::new(),
        None => link_frontier(
            &cfg.preset()?,
            &g.frontier_pes,
            g.frontier_rounds,
            &cfg.noise,
            &SimulationOptions::default(),
        )?,
    };
    // score every frontier point directly and keep the best
    let mut best: Option<(FrontierPoint, f64)> = None;
    for p in &grid.frontier {
        let link = effective_link_channel(
            1.0 - p.infidelity,
            p.t_ll_seconds,
            &cfg.noise,
            DEVICE_QUBITS - 2,
        )?;
        let score = simulate_noisy(&routed, &cfg.noise, &link)?.score();
        if best.map_or(true, |(_, s)| score > s) {
            best = Some((*p, score));
        }
    }
    let summary = GapSummary {
        benchmark: &g.benchmark,
        down_closed: grid.is_down_closed(),
        frontier_reaches_success: grid.frontier_reaches_success(),
        best_frontier_point: best.map(|b| b.0),
        best_frontier_score: best.map(|b| b.1),
    };
    out.result("gap", &summary);
    out.text(&format!("gap_{}.csv", g.benchmark), &grid.to_csv())?;
    out.csv("frontier.csv", &grid.frontier)?;
    let boundary = analytic_boundary(g.threshold, DEVICE_QUBITS as f64, cfg.noise.t_star(), 64)?;
    out.json("gap.json", &serde_json::json!({ "grid": grid, "summary": summary, "analytic_boundary": boundary }))
}

pub fn qv(cfg: &RunConfig, link: Option<&LinkRecord>, out: &mut Output) -> Res {
    let channel = match link {
        Some(l) => Some(effective_link_channel(l.f_ll, l.t_ll_seconds, &cfg.noise, DEVICE_QUBITS - 2)?),
        None => None,
    };
    let res = quantum_volume(&cfg.noise, channel.as_ref(), cfg.qv.trials, cfg.qv.max_width, cfg.seed)?;
    out.result("quantum_volume", &res.quantum_volume());
    out.json("qv.json", &res)
}

#[derive(Serialize)]
struct RooflineRow {
    benchmark: String,
    rounds: usize,
    #[serde(flatten)]
    report: roofline::RooflineReport,
}

#[derive(Serialize)]
struct CurveRow {
    rounds: usize,
    ccr: f64,
    bound: f64,
}

pub fn roofline(cfg: &RunConfig, t_link: Option<f64>, out: &mut Output) -> Res {
    let r = &cfg.roofline;
    let machine = RooflineMachine::new(DEVICE_QUBITS, r.t_local, t_link.unwrap_or(r.t_link))?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let topo = NodeTopology::two_rings();
    let mut profiles = Vec::new();
    for name in &r.benchmarks {
        let stats = match r.source {
            ProfileSource::Reference => roofline::reference_profile(name).ok_or_else(|| {
                CliError::Config(format!("no reference profile for `{name}`; use ghz, bv, qft or adder"))
            })?,
            ProfileSource::Compiled => {
                route(&build_benchmark(name, DEVICE_QUBITS, &mut rng)?, &topo)?.stats
            }
        };
        profiles.push((name.clone(), stats));
    }
    let ccrs = axis(r.ccr_axis)?;
    let mut rows = Vec::new();
    let mut curve = Vec::new();
    let mut mccr = Vec::new();
    for rounds in 0..=r.shift_rounds {
        let m = roofline::distillation_shift(&machine, rounds, r.shift)?;
        mccr.push(roofline::compute_mccr(&m));
        for (name, stats) in &profiles {
            rows.push(RooflineRow {
                benchmark: name.clone(),
                rounds,
                report: roofline::classify_bound(stats, &m, r.formula)?,
            });
        }
        curve.extend(
            roofline::roofline_curve(&m, &ccrs)
                .into_iter()
                .map(|(ccr, bound)| CurveRow { rounds, ccr, bound }),
        );
    }
    out.result("mccr", &mccr);
    out.json("roofline.json", &rows)?;
    out.csv("roofline_curve.csv", &curve)
}

#[derive(Serialize)]
struct CrossoverRow {
    bound: KnittingBound,
    knitting_gamma: f64,
    crossover_infidelity: Option<f64>,
}

pub fn qcpa(cfg: &RunConfig, link: Option<&LinkRecord>, out: &mut Output) -> Res {
    let q = &cfg.qcpa;
    let (f_ll, t_ll) = link.map_or((q.f_ll, q.t_ll), |l| (l.f_ll, l.t_ll_seconds));
    let t_star = cfg.noise.t_star();
    let rows = qcpa::overhead_table(q.k, &q.pec_fidelities)?;
    let query = QcpaQuery { f_ll, t_ll, t_star, n_q: q.n_q };
    let ln_gamma = qcpa::ln_pec_link_gamma(&query)?;
    let crossover: Vec<CrossoverRow> = [KnittingBound::Upper, KnittingBound::Lower]
        .into_iter()
        .map(|b| CrossoverRow {
            bound: b,
            knitting_gamma: qcpa::knitting_gamma(b),
            crossover_infidelity: qcpa::crossover_infidelity(b, t_ll, t_star, q.n_q).ok(),
        })
        .collect();
    let link_log10 = q.k as f64 * ln_gamma / std::f64::consts::LN_10;
    out.result("log10_circuits", &rows);
    out.csv("qcpa.csv", &rows)?;
    out.json(
        "qcpa.json",
        &serde_json::json!({
            "k": q.k,
            "k_text": qcpa::QFT_LINK_GATES_TEXT,
            "k_profile": qcpa::QFT_LINK_GATES_PROFILE,
            "link": { "f_ll": f_ll, "t_ll": t_ll, "t_star": t_star, "n_q": q.n_q,
                      "gamma": ln_gamma.exp(), "log10_circuits": link_log10 },
            "crossover": crossover,
        }),
    )
}

#[derive(Serialize)]
struct EstimatorRow {
    n_a: usize,
    estimator: Estimator,
    relative_error: f64,
}

#[derive(Serialize)]
struct CurveCsvRow {
    t1: f64,
    link_time: f64,
    relative_error: f64,
    baseline_n4: f64,
}

pub fn dqpe(cfg: &RunConfig, out: &mut Output) -> Res {
    let d = &cfg.dqpe;
    let mut rows = Vec::new();
    for &n_a in &d.ancillas {
        for e in Estimator::ALL {
            rows.push(EstimatorRow { n_a, estimator: e, relative_error: dqpe::qpe_relative_error(d.phase, n_a, e)? });
        }
    }
    out.csv("dqpe_errors.csv", &rows)?;
    let query = DqpeCostQuery {
        epsilon: d.epsilon,
        delta: d.delta,
        eps_theta: d.eps_theta,
        gamma: d.gamma,
        workers: dqpe::optimal_worker_count(d.epsilon, d.gamma)? as f64,
        alpha: d.alpha,
        e_gap: d.e_gap,
        polylog_power: d.polylog_power,
    };
    let mut depth = serde_json::Map::new();
    for v in [DepthVariant::Classical, DepthVariant::QuantumDistilled, DepthVariant::Qdrift] {
        let key = serde_json::to_value(v).expect("variant name");
        depth.insert(key.as_str().unwrap_or_default().to_string(), dqpe::parallel_depth_model(&query, v)?.into());
    }
    out.json(
        "dqpe.json",
        &serde_json::json!({
            "phase": d.phase,
            "optimal_workers": query.workers,
            "channel_tolerance": dqpe::channel_tolerance(d.epsilon, d.channel_uses)?,
            "depth": depth,
        }),
    )?;
    if d.curve {
        let curves = dqpe::qpe_link_error_curve(&d.curve_t1, &d.curve_link_times, 9, &cfg.noise)?;
        let rows: Vec<CurveCsvRow> = curves
            .iter()
            .flat_map(|c| {
                c.link_times.iter().zip(&c.errors).map(|(&t, &e)| CurveCsvRow {
                    t1: c.t1,
                    link_time: t,
                    relative_error: e,
                    baseline_n4: c.baseline_n4,
                })
            })
            .collect();
        out.csv("dqpe_curve.csv", &rows)?;
    }
    Ok(())
}

/// Physical layer -> distillation -> teleported CX -> selected analysis.
pub fn pipeline(cfg: &RunConfig, out: &mut Output) -> Res {
    let report = pipeline_link(cfg)?;
    let link = report.link;
    out.result("link", &link);
    out.json("link.json", &report)?;
    match cfg.analysis {
        Analysis::Roofline => roofline(cfg, Some(link.t_ll_seconds), out),
        Analysis::Qcpa => qcpa(cfg, Some(&link), out),
        Analysis::Qv => qv(cfg, Some(&link), out),
        Analysis::Gap => {
            let point = FrontierPoint {
                pe: link.pe,
                rounds: link.rounds,
                t_ll_seconds: link.t_ll_seconds,
                infidelity: 1.0 - link.f_ll,
            };
            gap(cfg, Some(vec![point]), out)
        }
    }
}

