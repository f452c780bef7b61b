//! Gate-level circuits and a noiseless statevector reference.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_4;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::densmat::gates;
use crate::error::{MnqcError, Result};

/// Duration of every local gate (s).
pub const LOCAL_GATE_TIME: f64 = 100e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum GateKind {
    H,
    X,
    /// Phase gate `diag(1, e^{i phi})`; T and S are special cases.
    Phase(f64),
    Rz(f64),
    Cx,
    Cz,
    CPhase(f64),
    Swap,
    Ccx,
    /// Arbitrary two-qubit block (QV); costed as three CX.
    Su4(Arc<DMatrix<Complex64>>),
}

impl GateKind {
    pub fn arity(&self) -> usize {
        match self {
            GateKind::H | GateKind::X | GateKind::Phase(_) | GateKind::Rz(_) => 1,
            GateKind::Ccx => 3,
            _ => 2,
        }
    }

    /// CX-equivalents charged to a two-qubit gate in the native basis.
    pub fn cx_count(&self) -> usize {
        match self {
            GateKind::Cx => 1,
            GateKind::Su4(_) => 3,
            _ => 0,
        }
    }

    pub fn matrix(&self) -> DMatrix<Complex64> {
        match self {
            GateKind::H => gates::h(),
            GateKind::X => gates::x(),
            GateKind::Phase(p) => gates::phase(*p),
            GateKind::Rz(t) => gates::rz(*t),
            GateKind::Cx => gates::cx(),
            GateKind::Cz => gates::cz(),
            GateKind::CPhase(p) => gates::controlled_phase(*p),
            GateKind::Swap => gates::swap(),
            GateKind::Ccx => gates::controlled(&gates::cx()),
            GateKind::Su4(u) => (**u).clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
    /// Local duration; internode gates take the link time at execution.
    pub duration: f64,
    pub internode: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Circuit {
    pub n_qubits: usize,
    pub gates: Vec<Gate>,
    pub name: String,
    pub params: BTreeMap<String, String>,
    /// Expected measurement values `(qubit, bit)`; when set, the score is the
    /// probability of reading them out rather than the state fidelity.
    pub readout: Option<Vec<(usize, bool)>>,
}

impl Circuit {
    pub fn new(n_qubits: usize, name: impl Into<String>) -> Self {
        Self {
            n_qubits,
            name: name.into(),
            ..Self::default()
        }
    }

    pub fn push(&mut self, kind: GateKind, qubits: &[usize]) -> Result<()> {
        if qubits.len() != kind.arity() {
            return Err(MnqcError::DimensionMismatch {
                expected: kind.arity(),
                actual: qubits.len(),
            });
        }
        for (i, &q) in qubits.iter().enumerate() {
            if q >= self.n_qubits {
                return Err(MnqcError::InvalidSubsystem { index: q, count: self.n_qubits });
            }
            if qubits[..i].contains(&q) {
                return Err(MnqcError::DuplicateSubsystem(q));
            }
        }
        self.gates.push(Gate {
            kind,
            qubits: qubits.to_vec(),
            duration: LOCAL_GATE_TIME,
            internode: false,
        });
        Ok(())
    }

    // infallible push for the builders, whose indices are correct by construction
    pub(crate) fn g(&mut self, kind: GateKind, qubits: &[usize]) {
        self.push(kind, qubits).expect("builder produced an invalid gate");
    }

    pub fn count(&self, pred: impl Fn(&Gate) -> bool) -> usize {
        self.gates.iter().filter(|g| pred(g)).count()
    }

    /// Rewrites into {H, X, Phase, Rz, CX, SU(4)}.
    pub fn to_native(&self) -> Circuit {
        let mut out = Circuit {
            gates: Vec::with_capacity(self.gates.len() * 2),
            ..self.clone()
        };
        for gate in &self.gates {
            let q = &gate.qubits;
            match &gate.kind {
                GateKind::Cz => {
                    out.g(GateKind::H, &[q[1]]);
                    out.g(GateKind::Cx, q);
                    out.g(GateKind::H, &[q[1]]);
                }
                GateKind::CPhase(phi) => {
                    let (a, b) = (q[0], q[1]);
                    out.g(GateKind::Phase(phi / 2.0), &[a]);
                    out.g(GateKind::Cx, &[a, b]);
                    out.g(GateKind::Phase(-phi / 2.0), &[b]);
                    out.g(GateKind::Cx, &[a, b]);
                    out.g(GateKind::Phase(phi / 2.0), &[b]);
                }
                GateKind::Swap => {
                    out.g(GateKind::Cx, &[q[0], q[1]]);
                    out.g(GateKind::Cx, &[q[1], q[0]]);
                    out.g(GateKind::Cx, &[q[0], q[1]]);
                }
                GateKind::Ccx => {
                    let (a, b, c) = (q[0], q[1], q[2]);
                    let t = GateKind::Phase(FRAC_PI_4);
                    let tdg = GateKind::Phase(-FRAC_PI_4);
                    out.g(GateKind::H, &[c]);
                    out.g(GateKind::Cx, &[b, c]);
                    out.g(tdg.clone(), &[c]);
                    out.g(GateKind::Cx, &[a, c]);
                    out.g(t.clone(), &[c]);
                    out.g(GateKind::Cx, &[b, c]);
                    out.g(tdg.clone(), &[c]);
                    out.g(GateKind::Cx, &[a, c]);
                    out.g(t.clone(), &[b]);
                    out.g(t.clone(), &[c]);
                    out.g(GateKind::H, &[c]);
                    out.g(GateKind::Cx, &[a, b]);
                    out.g(t, &[a]);
                    out.g(tdg, &[b]);
                    out.g(GateKind::Cx, &[a, b]);
                }
                _ => out.gates.push(gate.clone()),
            }
        }
        out
    }

    /// Noiseless output from `|0...0>`; qubit 0 is the most significant bit.
    pub fn statevector(&self) -> Vec<Complex64> {
        let mut psi = vec![Complex64::new(0.0, 0.0); 1 << self.n_qubits];
        psi[0] = Complex64::new(1.0, 0.0);
        for gate in &self.gates {
            apply_to_statevector(&mut psi, self.n_qubits, &gate.kind.matrix(), &gate.qubits);
        }
        psi
    }
}

/// `psi <- U psi` with `U` on `qubits` (first qubit most significant in `U`).
pub fn apply_to_statevector(
    psi: &mut [Complex64],
    n_qubits: usize,
    u: &DMatrix<Complex64>,
    qubits: &[usize],
) {
    let k = qubits.len();
    let bits: Vec<usize> = qubits.iter().map(|&q| 1 << (n_qubits - 1 - q)).collect();
    let mask: usize = bits.iter().sum();
    let offsets: Vec<usize> = (0..1usize << k)
        .map(|x| {
            (0..k)
                .filter(|&i| x >> (k - 1 - i) & 1 == 1)
                .map(|i| bits[i])
                .sum()
        })
        .collect();
    let mut buf = vec![Complex64::new(0.0, 0.0); 1 << k];
    for base in 0..psi.len() {
        if base & mask != 0 {
            continue;
        }
        for (b, &o) in buf.iter_mut().zip(&offsets) {
            *b = psi[base + o];
        }
        for (i, &o) in offsets.iter().enumerate() {
            psi[base + o] = (0..buf.len()).map(|j| u[(i, j)] * buf[j]).sum();
        }
    }
}
