//! Dense pure-state simulation.
//!
//! Amplitudes are packed big-endian: qubit 0 is the most significant bit of
//! the basis index, so `|abc⟩` lives at index `0bABC`. This keeps every ket
//! label written as `|Alice Bob Charlie⟩` directly comparable to an index.

use std::fmt;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

pub const MAX_QUBITS: usize = 12;

/// 2×2 complex matrix, row-major.
pub type Matrix2<T> = [[Complex<T>; 2]; 2];

#[derive(Clone, Debug, PartialEq)]
pub struct PureState<T> {
    n_qubits: usize,
    amps: Vec<Complex<T>>,
}

#[inline]
fn mask(n_qubits: usize, qubit: usize) -> usize {
    1 << (n_qubits - 1 - qubit)
}

fn check_qubit(n_qubits: usize, qubit: usize) -> Result<()> {
    if qubit >= n_qubits {
        return Err(Error::QubitIndex { qubit, n_qubits });
    }
    Ok(())
}

fn check_distinct(n_qubits: usize, qubits: &[usize]) -> Result<()> {
    for (i, &q) in qubits.iter().enumerate() {
        check_qubit(n_qubits, q)?;
        if qubits[..i].contains(&q) {
            return Err(Error::DuplicateQubit(q));
        }
    }
    Ok(())
}

fn check_draw<T: Real>(draw: T) -> Result<()> {
    if !(draw >= T::zero() && draw < T::one()) {
        return Err(Error::InvalidDraw(draw.as_f64()));
    }
    Ok(())
}

/// Branch probabilities below this are treated as numerically empty.
fn negligible<T: Real>() -> T {
    T::epsilon() * T::lit(64.0)
}

impl<T: Real> PureState<T> {
    /// Computational basis state `|index⟩` on `n_qubits` qubits.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::QubitCount(n_qubits));
        }
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::BasisIndex { index, n_qubits });
        }
        let mut amps = vec![Complex::new(T::zero(), T::zero()); dim];
        amps[index] = Complex::new(T::one(), T::zero());
        Ok(Self { n_qubits, amps })
    }

    /// Wraps an amplitude vector that must already be normalized.
    pub fn from_amplitudes(amps: Vec<Complex<T>>) -> Result<Self> {
        let state = Self::unchecked(amps)?;
        let norm = state.norm_sqr();
        if (norm - T::one()).abs() > T::EXACT_TOL {
            return Err(Error::NotNormalized(norm.as_f64()));
        }
        Ok(state)
    }

    /// Rescales an arbitrary nonzero amplitude vector to unit norm.
    pub fn normalized(amps: Vec<Complex<T>>) -> Result<Self> {
        let mut state = Self::unchecked(amps)?;
        let norm = state.norm_sqr();
        if norm <= negligible::<T>() {
            return Err(Error::ZeroNorm);
        }
        let scale = T::one() / norm.sqrt();
        state.amps.iter_mut().for_each(|a| *a = a.scale(scale));
        Ok(state)
    }

    fn unchecked(amps: Vec<Complex<T>>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::BadLength(len));
        }
        let n_qubits = len.trailing_zeros() as usize;
        if n_qubits > MAX_QUBITS {
            return Err(Error::QubitCount(n_qubits));
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { n_qubits, amps })
    }

    /// Single qubit `alpha|0⟩ + beta|1⟩`.
    pub fn qubit(alpha: Complex<T>, beta: Complex<T>) -> Result<Self> {
        Self::from_amplitudes(vec![alpha, beta])
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> Complex<T> {
        self.amps[index]
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Multiplies every amplitude by a unit-modulus phase.
    pub fn with_global_phase(&self, phase: Complex<T>) -> Self {
        Self {
            n_qubits: self.n_qubits,
            amps: self.amps.iter().map(|a| a * phase).collect(),
        }
    }

    pub fn apply(&self, gate: &Gate) -> Result<Self> {
        gate.validate(self.n_qubits)?;
        let n = self.n_qubits;
        let mut out = self.amps.clone();
        match *gate {
            Gate::H(q) => {
                let m = mask(n, q);
                let s = T::FRAC_1_SQRT_2();
                for i in (0..out.len()).filter(|i| i & m == 0) {
                    let (a0, a1) = (self.amps[i], self.amps[i | m]);
                    out[i] = (a0 + a1).scale(s);
                    out[i | m] = (a0 - a1).scale(s);
                }
            }
            Gate::X(q) => {
                let m = mask(n, q);
                for i in (0..out.len()).filter(|i| i & m == 0) {
                    out.swap(i, i | m);
                }
            }
            Gate::Z(q) => {
                let m = mask(n, q);
                for (i, a) in out.iter_mut().enumerate() {
                    if i & m != 0 {
                        *a = -*a;
                    }
                }
            }
            Gate::Cnot { control, target } => {
                let (c, t) = (mask(n, control), mask(n, target));
                for i in (0..out.len()).filter(|i| i & c != 0 && i & t == 0) {
                    out.swap(i, i | t);
                }
            }
            Gate::Toffoli {
                controls: [c1, c2],
                target,
            } => {
                let c = mask(n, c1) | mask(n, c2);
                let t = mask(n, target);
                for i in (0..out.len()).filter(|i| i & c == c && i & t == 0) {
                    out.swap(i, i | t);
                }
            }
        }
        Ok(Self {
            n_qubits: n,
            amps: out,
        })
    }

    pub fn apply_all<'a>(&self, gates: impl IntoIterator<Item = &'a Gate>) -> Result<Self> {
        gates.into_iter().try_fold(self.clone(), |s, g| s.apply(g))
    }

    /// Applies an arbitrary 2×2 matrix to one qubit. Unitarity is the
    /// caller's responsibility; see [`is_unitary`].
    pub fn apply_matrix(&self, qubit: usize, m: &Matrix2<T>) -> Result<Self> {
        check_qubit(self.n_qubits, qubit)?;
        let bit = mask(self.n_qubits, qubit);
        let mut out = self.amps.clone();
        for i in (0..out.len()).filter(|i| i & bit == 0) {
            let (a0, a1) = (self.amps[i], self.amps[i | bit]);
            out[i] = m[0][0] * a0 + m[0][1] * a1;
            out[i | bit] = m[1][0] * a0 + m[1][1] * a1;
        }
        Ok(Self {
            n_qubits: self.n_qubits,
            amps: out,
        })
    }

    /// Born probability of each basis vector of `basis` on `qubit`,
    /// indexed by outcome (0 ↦ |γ⟩, 1 ↦ |γ⊥⟩).
    pub fn basis_probabilities(&self, qubit: usize, basis: &SingleQubitBasis<T>) -> Result<[T; 2]> {
        check_qubit(self.n_qubits, qubit)?;
        let bit = mask(self.n_qubits, qubit);
        let mut p = [T::zero(); 2];
        for i in (0..self.amps.len()).filter(|i| i & bit == 0) {
            let (a0, a1) = (self.amps[i], self.amps[i | bit]);
            for (outcome, pk) in p.iter_mut().enumerate() {
                *pk = *pk + basis.component(outcome, a0, a1).norm_sqr();
            }
        }
        Ok(p)
    }

    /// Projects `qubit` onto basis vector `outcome`, leaving that qubit in
    /// the observed basis state and renormalizing the rest.
    pub fn project(
        &self,
        qubit: usize,
        basis: &SingleQubitBasis<T>,
        outcome: usize,
    ) -> Result<MeasurementResult<T>> {
        check_qubit(self.n_qubits, qubit)?;
        if outcome > 1 {
            return Err(Error::InvalidOutcome(outcome));
        }
        let probability = self.basis_probabilities(qubit, basis)?[outcome];
        if probability <= negligible::<T>() {
            return Err(Error::ZeroProbabilityBranch);
        }
        let scale = T::one() / probability.sqrt();
        let [v0, v1] = basis.vector(outcome);
        let bit = mask(self.n_qubits, qubit);
        let mut out = self.amps.clone();
        for i in (0..out.len()).filter(|i| i & bit == 0) {
            let r = basis
                .component(outcome, self.amps[i], self.amps[i | bit])
                .scale(scale);
            out[i] = v0 * r;
            out[i | bit] = v1 * r;
        }
        Ok(MeasurementResult {
            outcome,
            probability,
            post_state: Self {
                n_qubits: self.n_qubits,
                amps: out,
            },
        })
    }

    /// Projective measurement of one qubit in `basis`. The outcome is picked
    /// by placing `draw` on the half-open cumulative intervals
    /// `[0, p(γ))`, `[p(γ), 1)`.
    pub fn measure(
        &self,
        qubit: usize,
        basis: &SingleQubitBasis<T>,
        draw: T,
    ) -> Result<MeasurementResult<T>> {
        check_draw(draw)?;
        let [p0, _] = self.basis_probabilities(qubit, basis)?;
        let outcome = if draw < p0 { 0 } else { 1 };
        self.project(qubit, basis, outcome)
    }

    /// Exact computational-basis distribution over `qubits`; outcome bits
    /// are read in the order the qubits are listed.
    pub fn outcome_distribution(&self, qubits: &[usize]) -> Result<OutcomeDistribution<T>> {
        check_distinct(self.n_qubits, qubits)?;
        let mut probs = vec![T::zero(); 1 << qubits.len()];
        for (i, a) in self.amps.iter().enumerate() {
            let k = self.extract(i, qubits);
            probs[k] = probs[k] + a.norm_sqr();
        }
        Ok(OutcomeDistribution {
            qubits: qubits.to_vec(),
            probs,
        })
    }

    fn extract(&self, index: usize, qubits: &[usize]) -> usize {
        qubits.iter().fold(0, |acc, &q| {
            (acc << 1) | usize::from(index & mask(self.n_qubits, q) != 0)
        })
    }

    /// Collapses `qubits` onto the computational outcome `outcome`.
    pub fn project_computational(
        &self,
        qubits: &[usize],
        outcome: usize,
    ) -> Result<JointMeasurement<T>> {
        check_distinct(self.n_qubits, qubits)?;
        if outcome >= 1 << qubits.len() {
            return Err(Error::InvalidOutcome(outcome));
        }
        let probability: T = self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| self.extract(*i, qubits) == outcome)
            .map(|(_, a)| a.norm_sqr())
            .sum();
        if probability <= negligible::<T>() {
            return Err(Error::ZeroProbabilityBranch);
        }
        let scale = T::one() / probability.sqrt();
        let amps = self
            .amps
            .iter()
            .enumerate()
            .map(|(i, a)| {
                if self.extract(i, qubits) == outcome {
                    a.scale(scale)
                } else {
                    Complex::new(T::zero(), T::zero())
                }
            })
            .collect();
        Ok(JointMeasurement {
            outcome,
            probability,
            post_state: Self {
                n_qubits: self.n_qubits,
                amps,
            },
        })
    }

    /// Joint computational measurement of `qubits` with one draw over the
    /// cumulative distribution in outcome order.
    pub fn measure_computational(&self, qubits: &[usize], draw: T) -> Result<JointMeasurement<T>> {
        check_draw(draw)?;
        let dist = self.outcome_distribution(qubits)?;
        let mut acc = T::zero();
        let mut chosen = dist.probs.len() - 1;
        for (k, &p) in dist.probs.iter().enumerate() {
            acc = acc + p;
            if draw < acc {
                chosen = k;
                break;
            }
        }
        self.project_computational(qubits, chosen)
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::DimensionMismatch {
                left: self.n_qubits,
                right: other.n_qubits,
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| {
                acc + a.conj() * b
            }))
    }

    /// `|⟨self|other⟩|²`, clamped to [0, 1].
    pub fn fidelity(&self, other: &Self) -> Result<T> {
        let f = self.inner(other)?.norm_sqr();
        Ok(f.max(T::zero()).min(T::one()))
    }

    /// Kronecker product with `self`'s qubits first.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let n_qubits = self.n_qubits + other.n_qubits;
        if n_qubits > MAX_QUBITS {
            return Err(Error::QubitCount(n_qubits));
        }
        let amps = self
            .amps
            .iter()
            .flat_map(|a| other.amps.iter().map(move |b| a * b))
            .collect();
        Ok(Self { n_qubits, amps })
    }

    /// Largest elementwise deviation from `other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::DimensionMismatch {
                left: self.n_qubits,
                right: other.n_qubits,
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(T::zero(), T::max))
    }
}

impl<T: Real> fmt::Display for PureState<T> {
    /// Sparse ket listing, e.g. `0.5|000⟩ - 0.5|110⟩`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, a) in self.amps.iter().enumerate() {
            if a.norm() <= T::EXACT_TOL {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(
                f,
                "({:.6}{:+.6}i)|{:0width$b}⟩",
                a.re,
                a.im,
                i,
                width = self.n_qubits
            )?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// The gate set of the sharing circuit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gate {
    H(usize),
    X(usize),
    Z(usize),
    Cnot { control: usize, target: usize },
    Toffoli { controls: [usize; 2], target: usize },
}

impl Gate {
    pub fn cnot(control: usize, target: usize) -> Self {
        Gate::Cnot { control, target }
    }

    pub fn toffoli(c1: usize, c2: usize, target: usize) -> Self {
        Gate::Toffoli {
            controls: [c1, c2],
            target,
        }
    }

    /// Qubits the gate touches, controls first.
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::H(q) | Gate::X(q) | Gate::Z(q) => vec![q],
            Gate::Cnot { control, target } => vec![control, target],
            Gate::Toffoli {
                controls: [a, b],
                target,
            } => vec![a, b, target],
        }
    }

    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        check_distinct(n_qubits, &self.qubits())
    }

    /// Dense matrix on the gate's own qubits (ordered as [`Gate::qubits`]).
    pub fn matrix<T: Real>(&self) -> Vec<Vec<Complex<T>>> {
        let k = self.qubits().len();
        let dim = 1 << k;
        let local = self.relabelled();
        (0..dim)
            .map(|row| {
                (0..dim)
                    .map(|col| {
                        let column = PureState::<T>::basis(k, col)
                            .and_then(|s| s.apply(&local))
                            .expect("local gate fits its own register");
                        column.amplitude(row)
                    })
                    .collect()
            })
            .collect()
    }

    fn relabelled(&self) -> Gate {
        match *self {
            Gate::H(_) => Gate::H(0),
            Gate::X(_) => Gate::X(0),
            Gate::Z(_) => Gate::Z(0),
            Gate::Cnot { .. } => Gate::cnot(0, 1),
            Gate::Toffoli { .. } => Gate::toffoli(0, 1, 2),
        }
    }
}

/// Checks `U†U = I` for a 2×2 matrix within `tol`.
pub fn is_unitary<T: Real>(m: &Matrix2<T>, tol: T) -> bool {
    (0..2).all(|i| {
        (0..2).all(|j| {
            let entry = m[0][i].conj() * m[0][j] + m[1][i].conj() * m[1][j];
            let expected = if i == j { T::one() } else { T::zero() };
            (entry - Complex::new(expected, T::zero())).norm() <= tol
        })
    })
}

/// Orthonormal basis `{|γ⟩ = a|0⟩ + b|1⟩, |γ⊥⟩ = b*|0⟩ − a*|1⟩}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SingleQubitBasis<T> {
    a: Complex<T>,
    b: Complex<T>,
}

impl<T: Real> SingleQubitBasis<T> {
    pub fn new(a: Complex<T>, b: Complex<T>) -> Result<Self> {
        let norm = a.norm_sqr() + b.norm_sqr();
        if !norm.is_finite() || (norm - T::one()).abs() > T::EXACT_TOL {
            return Err(Error::DegenerateBasis(norm.as_f64()));
        }
        Ok(Self { a, b })
    }

    pub fn computational() -> Self {
        Self {
            a: Complex::new(T::one(), T::zero()),
            b: Complex::new(T::zero(), T::zero()),
        }
    }

    /// `{|+⟩, |−⟩}`.
    pub fn hadamard() -> Self {
        Self::from_angle(T::FRAC_PI_4())
    }

    /// Real basis `a = cos t`, `b = sin t`, with `t` in radians.
    pub fn from_angle(t: T) -> Self {
        Self {
            a: Complex::new(t.cos(), T::zero()),
            b: Complex::new(t.sin(), T::zero()),
        }
    }

    pub fn from_degrees(deg: T) -> Self {
        Self::from_angle(deg.to_radians())
    }

    pub fn a(&self) -> Complex<T> {
        self.a
    }

    pub fn b(&self) -> Complex<T> {
        self.b
    }

    /// Components `[⟨0|v⟩, ⟨1|v⟩]` of basis vector `outcome`.
    pub fn vector(&self, outcome: usize) -> [Complex<T>; 2] {
        if outcome == 0 {
            [self.a, self.b]
        } else {
            [self.b.conj(), -self.a.conj()]
        }
    }

    /// `⟨v_outcome| (a0|0⟩ + a1|1⟩)`.
    fn component(&self, outcome: usize, a0: Complex<T>, a1: Complex<T>) -> Complex<T> {
        let [v0, v1] = self.vector(outcome);
        v0.conj() * a0 + v1.conj() * a1
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementResult<T> {
    pub outcome: usize,
    pub probability: T,
    pub post_state: PureState<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct JointMeasurement<T> {
    /// Outcome bits packed in the order the qubits were listed.
    pub outcome: usize,
    pub probability: T,
    pub post_state: PureState<T>,
}

/// Exact Born distribution over a set of qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct OutcomeDistribution<T> {
    qubits: Vec<usize>,
    probs: Vec<T>,
}

impl<T: Real> OutcomeDistribution<T> {
    pub fn qubits(&self) -> &[usize] {
        &self.qubits
    }

    pub fn probabilities(&self) -> &[T] {
        &self.probs
    }

    pub fn probability(&self, outcome: usize) -> T {
        self.probs.get(outcome).copied().unwrap_or_else(T::zero)
    }

    /// Looks up a bit-string key such as `"01"`.
    pub fn get(&self, bits: &str) -> Option<T> {
        if bits.len() != self.qubits.len() {
            return None;
        }
        usize::from_str_radix(bits, 2).ok().map(|k| self.probs[k])
    }

    pub fn label(&self, outcome: usize) -> String {
        format!("{:0width$b}", outcome, width = self.qubits.len())
    }

    pub fn iter(&self) -> impl Iterator<Item = (String, T)> + '_ {
        self.probs
            .iter()
            .enumerate()
            .map(|(k, &p)| (self.label(k), p))
    }

    pub fn total(&self) -> T {
        self.probs.iter().copied().sum()
    }
}
