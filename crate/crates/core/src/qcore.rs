//! Dense density-matrix engine for two and four qubits.
//!
//! Every closed-form statistic in [`crate::protocol`] and
//! [`crate::tomography`] has a brute-force counterpart here: build the state
//! as a matrix, apply the gates, read off the measurement probabilities.
//!
//! # Qubit ordering
//!
//! Basis states are indexed big-endian: the first qubit listed is the most
//! significant bit, and `|0⟩` is the Z = +1 eigenstate.
//!
//! - A two-qubit state (4x4) orders its qubits as (Alice, Bob), so index
//!   `2*a + b`.
//! - A four-qubit state (16x16) built by [`tensor`]`(control, target)` orders
//!   its qubits as (A-control, B-control, A-target, B-target), so index
//!   `8*a_c + 4*b_c + 2*a_t + b_t`.
//!
//! The bilateral CNOT uses each party's control-pair qubit as the control and
//! its target-pair qubit as the target: `a_t ^= a_c`, `b_t ^= b_c`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_range, Error, Result};
use crate::protocol::OutcomeDistribution;

/// Tolerance for Hermiticity and unit trace.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Smallest eigenvalue accepted as positive semidefinite.
pub const PSD_TOL: f64 = 1e-10;
/// Branches with probability below this have no post-measurement state.
pub const BRANCH_TOL: f64 = 1e-15;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Werner parameter `w ∈ [0, 1]`: weight of the maximally mixed component.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WernerParam(f64);

impl WernerParam {
    pub const NOISELESS: WernerParam = WernerParam(0.0);
    pub const FULLY_MIXED: WernerParam = WernerParam(1.0);

    pub fn new(w: f64) -> Result<Self> {
        check_range("w", w, 0.0, 1.0, "[0, 1]").map(WernerParam)
    }

    /// Inverse of [`WernerParam::fidelity`]: `w = 4(1 - F)/3`.
    pub fn from_fidelity(fidelity: f64) -> Result<Self> {
        let f = check_range("F", fidelity, 0.25, 1.0, "[1/4, 1]")?;
        // Rounding can push the endpoints a hair outside [0, 1].
        Ok(WernerParam((4.0 * (1.0 - f) / 3.0).clamp(0.0, 1.0)))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Overlap with Φ⁺: `F = 1 - 3w/4`.
    pub fn fidelity(self) -> f64 {
        1.0 - 0.75 * self.0
    }

    /// Weight of the Φ⁺ component, `1 - w`.
    pub fn singlet_weight(self) -> f64 {
        1.0 - self.0
    }
}

/// Depolarizing strength `x ∈ [0, 1]` of `ρ ↦ (1 - x)ρ + x·𝕀/4`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DepolarizingParam(f64);

impl DepolarizingParam {
    pub const NONE: DepolarizingParam = DepolarizingParam(0.0);

    pub fn new(x: f64) -> Result<Self> {
        check_range("x", x, 0.0, 1.0, "[0, 1]").map(DepolarizingParam)
    }

    /// Idle-memory model: `x = 1 - exp(-t/T)` for idle time `t` and
    /// coherence time `T`.
    pub fn from_idle(t: f64, coherence_time: f64) -> Result<Self> {
        check_range("t", t, 0.0, f64::INFINITY, "[0, inf)")?;
        if !(coherence_time.is_finite() && coherence_time > 0.0) {
            return Err(Error::Domain {
                name: "T",
                value: coherence_time,
                range: "(0, inf)",
            });
        }
        Ok(DepolarizingParam(-(-t / coherence_time).exp_m1()))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `1 - x`, the weight left on the input state.
    pub fn survival(self) -> f64 {
        1.0 - self.0
    }
}

/// A 4x4 (two-qubit) or 16x16 (four-qubit) density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    m: DMatrix<Complex64>,
}

/// Why a matrix failed [`DensityMatrix::check`].
#[derive(Debug, Clone, PartialEq)]
pub enum InvariantViolation {
    NotHermitian { row: usize, col: usize, deviation: f64 },
    Trace { trace: f64 },
    NotPositive { min_eigenvalue: f64 },
}

impl DensityMatrix {
    /// Wraps a matrix after checking its dimension and the density-matrix
    /// invariants.
    pub fn from_matrix(m: DMatrix<Complex64>) -> Result<Self> {
        let dim = m.nrows();
        if m.ncols() != dim || (dim != 4 && dim != 16) {
            return Err(Error::Shape {
                expected: 4,
                actual: dim.max(m.ncols()),
            });
        }
        let rho = DensityMatrix { m };
        match rho.check() {
            Ok(()) => Ok(rho),
            Err(violation) => Err(Error::Domain {
                name: "density matrix",
                value: match violation {
                    InvariantViolation::NotHermitian { deviation, .. } => deviation,
                    InvariantViolation::Trace { trace } => trace,
                    InvariantViolation::NotPositive { min_eigenvalue } => min_eigenvalue,
                },
                range: "Hermitian, unit-trace, positive semidefinite matrices",
            }),
        }
    }

    /// Row-major entries.
    pub fn from_row_major(dim: usize, entries: &[Complex64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::Shape {
                expected: dim,
                actual: (entries.len() as f64).sqrt() as usize,
            });
        }
        Self::from_matrix(DMatrix::from_row_slice(dim, dim, entries))
    }

    fn unchecked(m: DMatrix<Complex64>) -> Self {
        DensityMatrix { m }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.m[(row, col)]
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.m
    }

    pub fn trace(&self) -> Complex64 {
        self.m.trace()
    }

    /// `Tr(ρσ)`. Equals the fidelity when either argument is pure.
    pub fn overlap(&self, other: &DensityMatrix) -> Result<f64> {
        expect_dim(other, self.dim())?;
        Ok((&self.m * &other.m).trace().re)
    }

    /// `⟨Φ⁺|ρ|Φ⁺⟩` for a two-qubit state.
    pub fn phi_plus_fidelity(&self) -> Result<f64> {
        expect_dim(self, 4)?;
        let m = &self.m;
        Ok(0.5 * (m[(0, 0)] + m[(0, 3)] + m[(3, 0)] + m[(3, 3)]).re)
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.m.clone().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Number of eigenvalues above `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        self.eigenvalues().into_iter().filter(|&e| e > tol).count()
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        self.m
            .iter()
            .zip(other.m.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Checks Hermiticity and trace to [`HERMITIAN_TOL`] and positivity to
    /// [`PSD_TOL`].
    pub fn check(&self) -> std::result::Result<(), InvariantViolation> {
        let n = self.dim();
        for row in 0..n {
            for col in row..n {
                let deviation = (self.m[(row, col)] - self.m[(col, row)].conj()).norm();
                if deviation > HERMITIAN_TOL {
                    return Err(InvariantViolation::NotHermitian { row, col, deviation });
                }
            }
        }
        let tr = self.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > HERMITIAN_TOL {
            return Err(InvariantViolation::Trace { trace: tr.re });
        }
        let min_eigenvalue = self.eigenvalues()[0];
        if min_eigenvalue < -PSD_TOL {
            return Err(InvariantViolation::NotPositive { min_eigenvalue });
        }
        Ok(())
    }

    pub fn to_json(&self) -> DensityMatrixJson {
        DensityMatrixJson {
            dim: self.dim(),
            entries: self
                .m
                .row_iter()
                .map(|row| row.iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        }
    }

    pub fn from_json(json: &DensityMatrixJson) -> Result<Self> {
        if json.entries.len() != json.dim || json.entries.iter().any(|r| r.len() != json.dim) {
            return Err(Error::Shape {
                expected: json.dim,
                actual: json.entries.len(),
            });
        }
        let flat: Vec<Complex64> = json
            .entries
            .iter()
            .flatten()
            .map(|&[re, im]| Complex64::new(re, im))
            .collect();
        Self::from_row_major(json.dim, &flat)
    }
}

/// Debug dump layout: row-major rows of `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityMatrixJson {
    pub dim: usize,
    pub entries: Vec<Vec<[f64; 2]>>,
}

fn expect_dim(rho: &DensityMatrix, dim: usize) -> Result<()> {
    if rho.dim() == dim {
        Ok(())
    } else {
        Err(Error::Shape {
            expected: dim,
            actual: rho.dim(),
        })
    }
}

/// `𝕀/dim`.
pub fn maximally_mixed(dim: usize) -> DensityMatrix {
    DensityMatrix::unchecked(DMatrix::identity(dim, dim) / Complex64::new(dim as f64, 0.0))
}

/// `|Φ⁺⟩⟨Φ⁺|` with `|Φ⁺⟩ = (|00⟩ + |11⟩)/√2`.
pub fn bell_phi_plus() -> DensityMatrix {
    let mut m = DMatrix::from_element(4, 4, ZERO);
    for &i in &[0, 3] {
        for &j in &[0, 3] {
            m[(i, j)] = Complex64::new(0.5, 0.0);
        }
    }
    DensityMatrix::unchecked(m)
}

/// `(1 - w)|Φ⁺⟩⟨Φ⁺| + (w/4)𝕀`.
pub fn werner_state(w: WernerParam) -> DensityMatrix {
    let w = w.value();
    let m = bell_phi_plus().m * Complex64::new(1.0 - w, 0.0)
        + DMatrix::identity(4, 4) * Complex64::new(w / 4.0, 0.0);
    DensityMatrix::unchecked(m)
}

/// `(1 - x)ρ + (x/4)𝕀` on a two-qubit state.
pub fn depolarize(rho: &DensityMatrix, x: DepolarizingParam) -> Result<DensityMatrix> {
    expect_dim(rho, 4)?;
    let x = x.value();
    let m = &rho.m * Complex64::new(1.0 - x, 0.0)
        + DMatrix::identity(4, 4) * Complex64::new(x / 4.0, 0.0);
    Ok(DensityMatrix::unchecked(m))
}

/// `control ⊗ target` as a four-qubit state in (A-control, B-control,
/// A-target, B-target) order.
pub fn tensor(control: &DensityMatrix, target: &DensityMatrix) -> Result<DensityMatrix> {
    expect_dim(control, 4)?;
    expect_dim(target, 4)?;
    Ok(DensityMatrix::unchecked(control.m.kronecker(&target.m)))
}

/// Basis permutation performed by the two local CNOTs.
fn bilateral_cnot_index(i: usize) -> usize {
    let a_c = (i >> 3) & 1;
    let b_c = (i >> 2) & 1;
    i ^ (a_c << 1) ^ b_c
}

/// The 16x16 permutation unitary `CNOT_A ⊗ CNOT_B` in the four-qubit
/// ordering.
pub fn bilateral_cnot_unitary() -> DMatrix<Complex64> {
    let mut u = DMatrix::from_element(16, 16, ZERO);
    for i in 0..16 {
        u[(bilateral_cnot_index(i), i)] = Complex64::new(1.0, 0.0);
    }
    u
}

/// Conjugates a four-qubit state by the bilateral CNOT.
///
/// The gate is a basis permutation `π`, so `ρ'[π(i), π(j)] = ρ[i, j]`.
pub fn bilateral_cnot(rho: &DensityMatrix) -> Result<DensityMatrix> {
    expect_dim(rho, 16)?;
    let mut out = DMatrix::from_element(16, 16, ZERO);
    for i in 0..16 {
        for j in 0..16 {
            out[(bilateral_cnot_index(i), bilateral_cnot_index(j))] = rho.m[(i, j)];
        }
    }
    Ok(DensityMatrix::unchecked(out))
}

/// Result of measuring both target qubits in the Z basis.
#[derive(Debug, Clone)]
pub struct TargetMeasurement {
    pub distribution: OutcomeDistribution,
    /// Normalized control-pair state for outcomes `00, 01, 10, 11` (Alice's
    /// bit first). `None` when the branch probability is below
    /// [`BRANCH_TOL`].
    pub post_states: [Option<DensityMatrix>; 4],
    unnormalized: [DMatrix<Complex64>; 4],
}

impl TargetMeasurement {
    /// Control-pair state conditioned on a correlated outcome (`00` or `11`),
    /// i.e. the pair that distillation keeps. `None` if that event has
    /// probability below [`BRANCH_TOL`].
    pub fn kept_state(&self) -> Option<DensityMatrix> {
        let p = self.distribution.p00 + self.distribution.p11;
        if p < BRANCH_TOL {
            return None;
        }
        let m = (&self.unnormalized[0] + &self.unnormalized[3]) / Complex64::new(p, 0.0);
        Some(DensityMatrix::unchecked(m))
    }
}

/// Z⊗Z measurement of the two target qubits of a four-qubit state.
pub fn measure_target_zz(rho: &DensityMatrix) -> Result<TargetMeasurement> {
    expect_dim(rho, 16)?;
    let mut probs = [0.0; 4];
    let unnormalized: [DMatrix<Complex64>; 4] = std::array::from_fn(|outcome| {
        DMatrix::from_fn(4, 4, |r, c| rho.m[(r * 4 + outcome, c * 4 + outcome)])
    });
    for (p, block) in probs.iter_mut().zip(&unnormalized) {
        *p = block.trace().re;
    }
    let post_states = std::array::from_fn(|k| {
        (probs[k] >= BRANCH_TOL).then(|| {
            DensityMatrix::unchecked(&unnormalized[k] / Complex64::new(probs[k], 0.0))
        })
    });
    Ok(TargetMeasurement {
        distribution: OutcomeDistribution {
            p00: probs[0],
            p01: probs[1],
            p10: probs[2],
            p11: probs[3],
        },
        post_states,
        unnormalized,
    })
}

/// Full dense distillation round: tensor, bilateral CNOT, target
/// measurement.
pub fn distillation_round(
    control: &DensityMatrix,
    target: &DensityMatrix,
) -> Result<TargetMeasurement> {
    let joint = tensor(control, target)?;
    measure_target_zz(&bilateral_cnot(&joint)?)
}

/// Z⊗Z outcome probabilities of a single two-qubit state (the diagonal).
pub fn measure_zz(rho: &DensityMatrix) -> Result<OutcomeDistribution> {
    expect_dim(rho, 4)?;
    Ok(OutcomeDistribution {
        p00: rho.m[(0, 0)].re,
        p01: rho.m[(1, 1)].re,
        p10: rho.m[(2, 2)].re,
        p11: rho.m[(3, 3)].re,
    })
}
