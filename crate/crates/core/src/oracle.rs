//! Closed-form reference states and exact branch enumeration.
//!
//! Every state here is written out term by term from its ket expansion, not
//! produced by running the circuit, so agreement with the simulator is a
//! genuine cross-check. Printed expressions that are not unit norm are kept
//! verbatim and only renormalized for comparison.

use std::fmt;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::protocol::{
    force_cheat, party_hadamards, reconstruct, resolve, AdversaryOutcome, AncillaOutcome,
    CheatModel, Party, Secret, Verdict, ANCILLA,
};
use crate::scalar::Real;
use crate::statevec::{PureState, SingleQubitBasis};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PaperLabel {
    /// Honest evolution `ψ0..ψ8`.
    Psi(u8),
    /// Alice–Charlie remainder after Bob reads |0⟩.
    Psi3AC,
    /// Alice–Bob remainder after Charlie reads |0⟩.
    Psi3AB,
    /// Alice's remainder after both read |0⟩.
    Psi3A,
    /// Final state, Bob read |0⟩.
    Eq2,
    /// Final state, Bob read |1⟩.
    Eq3,
    /// Final state, Charlie read |0⟩.
    Eq4,
    /// Final state, Charlie read |1⟩.
    Eq5,
    /// Final state, Bob read |γ⟩ in an arbitrary basis, verbatim.
    Eq6AsPrinted,
    Eq6Normalized,
    /// Final state, Bob read |+⟩.
    PlusBasisCase,
    /// Final state, both read |0⟩.
    BothCheatFinal,
}

impl fmt::Display for PaperLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PaperLabel::Psi(k) => write!(f, "psi{k}"),
            PaperLabel::Psi3AC => f.write_str("psi3_AC"),
            PaperLabel::Psi3AB => f.write_str("psi3_AB"),
            PaperLabel::Psi3A => f.write_str("psi3_A"),
            PaperLabel::Eq2 => f.write_str("eq2"),
            PaperLabel::Eq3 => f.write_str("eq3"),
            PaperLabel::Eq4 => f.write_str("eq4"),
            PaperLabel::Eq5 => f.write_str("eq5"),
            PaperLabel::Eq6AsPrinted => f.write_str("eq6_printed"),
            PaperLabel::Eq6Normalized => f.write_str("eq6_normalized"),
            PaperLabel::PlusBasisCase => f.write_str("plus_basis_case"),
            PaperLabel::BothCheatFinal => f.write_str("both_cheat_final"),
        }
    }
}

/// A closed-form three-qubit state.
#[derive(Clone, Debug, PartialEq)]
pub struct PaperState<T> {
    pub label: PaperLabel,
    pub amplitudes: Vec<Complex<T>>,
    /// Whether the stored vector has unit norm.
    pub normalized: bool,
}

impl<T: Real> PaperState<T> {
    fn from_terms(label: PaperLabel, terms: &[(usize, Complex<T>)]) -> Self {
        let mut amplitudes = vec![Complex::new(T::zero(), T::zero()); 8];
        for &(index, amp) in terms {
            amplitudes[index] = amplitudes[index] + amp;
        }
        let norm: T = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        Self {
            label,
            amplitudes,
            normalized: (norm - T::one()).abs() <= T::EXACT_TOL,
        }
    }

    pub fn norm_sqr(&self) -> T {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Renormalized copy as a simulator state.
    pub fn to_state(&self) -> Result<PureState<T>> {
        PureState::normalized(self.amplitudes.clone())
    }

    fn renormalized(&self, label: PaperLabel) -> Option<Self> {
        let state = self.to_state().ok()?;
        Some(Self {
            label,
            amplitudes: state.amplitudes().to_vec(),
            normalized: true,
        })
    }
}

fn r<T: Real>(x: f64) -> Complex<T> {
    Complex::new(T::lit(x), T::zero())
}

/// `ψ0..ψ8` of the honest run.
pub fn honest_states<T: Real>(secret: &Secret<T>) -> Vec<PaperState<T>> {
    let (a, b) = (secret.alpha(), secret.beta());
    let s = r::<T>(std::f64::consts::FRAC_1_SQRT_2);
    let h = r::<T>(0.5);
    let psi0 = [(0b011, a), (0b111, b)];
    let psi2 = [
        (0b011, a * s),
        (0b100, a * s),
        (0b011, b * s),
        (0b100, -b * s),
    ];
    let layers: Vec<Vec<(usize, Complex<T>)>> = vec![
        psi0.to_vec(),
        vec![
            (0b011, a * s),
            (0b111, a * s),
            (0b011, b * s),
            (0b111, -b * s),
        ],
        psi2.to_vec(),
        vec![
            (0b000, a * h),
            (0b110, -a * h),
            (0b011, a * h),
            (0b101, -a * h),
            (0b100, b * h),
            (0b010, -b * h),
            (0b001, -b * h),
            (0b111, b * h),
        ],
        psi2.to_vec(),
        vec![
            (0b011, a * s),
            (0b111, a * s),
            (0b011, b * s),
            (0b111, -b * s),
        ],
        vec![
            (0b011, a * s),
            (0b111, a * s),
            (0b011, -b * s),
            (0b111, b * s),
        ],
        vec![(0b011, a), (0b111, -b)],
        psi0.to_vec(),
    ];
    layers
        .iter()
        .enumerate()
        .map(|(k, terms)| PaperState::from_terms(PaperLabel::Psi(k as u8), terms))
        .collect()
}

/// The remainder left after the named parties read |0⟩, with the measured
/// qubits sitting in |0⟩. `None` when nobody cheats.
pub fn collapsed_remainder<T: Real>(
    secret: &Secret<T>,
    cheaters: &[Party],
) -> Option<PaperState<T>> {
    let (a, b) = (secret.alpha(), secret.beta());
    let s = r::<T>(std::f64::consts::FRAC_1_SQRT_2);
    let bob = cheaters.contains(&Party::Bob);
    let charlie = cheaters.contains(&Party::Charlie);
    Some(match (bob, charlie) {
        (true, false) => PaperState::from_terms(
            PaperLabel::Psi3AC,
            &[
                (0b000, a * s),
                (0b101, -a * s),
                (0b100, b * s),
                (0b001, -b * s),
            ],
        ),
        (false, true) => PaperState::from_terms(
            PaperLabel::Psi3AB,
            &[
                (0b000, a * s),
                (0b110, -a * s),
                (0b100, b * s),
                (0b010, -b * s),
            ],
        ),
        (true, true) => PaperState::from_terms(PaperLabel::Psi3A, &[(0b000, a), (0b100, b)]),
        (false, false) => return None,
    })
}

/// Final state after a computational-basis cheat by `who` reading `outcome`.
pub fn cheat_final_state<T: Real>(
    secret: &Secret<T>,
    who: Party,
    outcome: usize,
) -> Result<PaperState<T>> {
    if outcome > 1 {
        return Err(Error::InvalidOutcome(outcome));
    }
    let (a, b) = (secret.alpha(), secret.beta());
    let s = r::<T>(std::f64::consts::FRAC_1_SQRT_2);
    // (α|0⟩+β|1⟩)|11⟩ ± (α|0⟩−β|1⟩)|flag⟩
    let sign = if outcome == 0 {
        r::<T>(1.0)
    } else {
        r::<T>(-1.0)
    };
    let (label, flag) = match (who, outcome) {
        (Party::Bob, 0) => (PaperLabel::Eq2, 0b001),
        (Party::Bob, _) => (PaperLabel::Eq3, 0b001),
        (Party::Charlie, 0) => (PaperLabel::Eq4, 0b010),
        (Party::Charlie, _) => (PaperLabel::Eq5, 0b010),
    };
    Ok(PaperState::from_terms(
        label,
        &[
            (0b011, a * s),
            (0b111, b * s),
            (flag, sign * a * s),
            (0b100 | flag, -sign * b * s),
        ],
    ))
}

/// `α' = α − β(ab* + a*b)`, `β' = β − α(ab* + a*b)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShiftedCoefficients<T> {
    pub alpha_prime: Complex<T>,
    pub beta_prime: Complex<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ArbitraryBasisFinal<T> {
    pub as_printed: PaperState<T>,
    /// `None` when the printed vector vanishes.
    pub normalized: Option<PaperState<T>>,
    pub shifted: ShiftedCoefficients<T>,
}

/// Final state when Bob measures in `{|γ⟩, |γ⊥⟩}` and reads |γ⟩.
pub fn arbitrary_basis_final_state<T: Real>(
    secret: &Secret<T>,
    basis: &SingleQubitBasis<T>,
) -> ArbitraryBasisFinal<T> {
    let (al, be) = (secret.alpha(), secret.beta());
    let (a, b) = (basis.a(), basis.b());
    let s = r::<T>(std::f64::consts::FRAC_1_SQRT_2);
    let cross = a * b.conj() + a.conj() * b;
    let anti = a.conj() * b - a * b.conj();
    let diff = Complex::new(a.norm_sqr() - b.norm_sqr(), T::zero());
    let shifted = ShiftedCoefficients {
        alpha_prime: al - be * cross,
        beta_prime: be - al * cross,
    };
    let as_printed = PaperState::from_terms(
        PaperLabel::Eq6AsPrinted,
        &[
            (0b011, (al - be * cross) * s),
            (0b111, -(al * cross - be) * s),
            (0b001, (al * diff + be * anti) * s),
            (0b101, (-al * anti - be * diff) * s),
        ],
    );
    let normalized = as_printed.renormalized(PaperLabel::Eq6Normalized);
    ArbitraryBasisFinal {
        as_printed,
        normalized,
        shifted,
    }
}

/// Printed final state when Bob reads |+⟩: `(α−β)(|0⟩−|1⟩)|11⟩/√2`.
pub fn plus_basis_final_state<T: Real>(secret: &Secret<T>) -> PaperState<T> {
    let d = (secret.alpha() - secret.beta()) * r::<T>(std::f64::consts::FRAC_1_SQRT_2);
    PaperState::from_terms(PaperLabel::PlusBasisCase, &[(0b011, d), (0b111, -d)])
}

/// Printed final state when both read |0⟩.
pub fn both_cheat_final_state<T: Real>(secret: &Secret<T>) -> PaperState<T> {
    let (a, b) = (secret.alpha(), secret.beta());
    let s = r::<T>(std::f64::consts::FRAC_1_SQRT_2);
    let mut terms = vec![(0b011, a * s), (0b111, b * s)];
    for flag in [0b000, 0b001, 0b010] {
        terms.push((flag, a * s));
        terms.push((0b100 | flag, -b * s));
    }
    PaperState::from_terms(PaperLabel::BothCheatFinal, &terms)
}

/// One fully resolved path: adversary readings, then Alice's ancilla reading.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactBranch<T> {
    pub adversary: Vec<AdversaryOutcome<T>>,
    pub ancilla_outcome: AncillaOutcome,
    /// Joint Born weight of the path.
    pub probability: T,
    pub verdict: Verdict,
    pub fidelity_before_correction: T,
    pub fidelity_recovered: T,
}

/// Every path with nonzero weight, in adversary-outcome then ancilla order.
pub fn enumerate_branches<T: Real>(
    secret: &Secret<T>,
    cheat: &CheatModel<T>,
) -> Result<Vec<ExactBranch<T>>> {
    let psi3 = crate::protocol::encode(secret);
    let n_cheaters = cheat.cheaters().len();
    let mut branches = Vec::new();
    for pattern in 0..(1usize << n_cheaters) {
        let outcomes: Vec<usize> = (0..n_cheaters)
            .map(|k| (pattern >> (n_cheaters - 1 - k)) & 1)
            .collect();
        let (collapsed, adversary, weight) = match force_cheat(&psi3, cheat, &outcomes) {
            Ok(v) => v,
            Err(Error::ZeroProbabilityBranch) => continue,
            Err(e) => return Err(e),
        };
        let (psi8, _) = reconstruct(&party_hadamards(&collapsed)?)?;
        let dist = psi8.outcome_distribution(&ANCILLA)?;
        for outcome in AncillaOutcome::ALL {
            if dist.probability(outcome.index()) <= T::epsilon() * T::lit(64.0) {
                continue;
            }
            let res = resolve(&psi8, outcome, secret)?;
            branches.push(ExactBranch {
                adversary: adversary.clone(),
                ancilla_outcome: outcome,
                probability: weight * res.probability,
                verdict: res.verdict,
                fidelity_before_correction: res.fidelity_before_correction,
                fidelity_recovered: res.fidelity_recovered,
            });
        }
    }
    Ok(branches)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExactDistribution<T> {
    /// Indexed by [`AncillaOutcome::index`].
    pub support: [T; 4],
    pub conditioning: String,
}

impl<T: Real> ExactDistribution<T> {
    pub fn probability(&self, outcome: AncillaOutcome) -> T {
        self.support[outcome.index()]
    }

    pub fn get(&self, bits: &str) -> Result<T> {
        Ok(self.probability(bits.parse()?))
    }

    pub fn total(&self) -> T {
        self.support.iter().copied().sum()
    }
}

fn describe<T: Real>(cheat: &CheatModel<T>) -> String {
    let cheaters = cheat.cheaters();
    if cheaters.is_empty() {
        return "honest: no adversary branches".to_string();
    }
    let parts: Vec<String> = cheaters
        .iter()
        .map(|(p, b)| {
            format!(
                "{p} measures in a=({:.6}{:+.6}i), b=({:.6}{:+.6}i)",
                b.a().re,
                b.a().im,
                b.b().re,
                b.b().im
            )
        })
        .collect();
    format!(
        "{}; every branch weighted by its Born probability",
        parts.join(", ")
    )
}

/// Aggregate of [`enumerate_branches`].
#[derive(Clone, Debug, PartialEq)]
pub struct ExactSummary<T> {
    pub distribution: ExactDistribution<T>,
    pub mean_fidelity_before_correction: T,
    pub mean_fidelity_after_correction: T,
    /// Marginal probabilities of each cheater's two outcomes.
    pub adversary_marginals: Vec<(Party, [T; 2])>,
    pub branches: Vec<ExactBranch<T>>,
}

pub fn exact_summary<T: Real>(
    secret: &Secret<T>,
    cheat: &CheatModel<T>,
) -> Result<ExactSummary<T>> {
    let branches = enumerate_branches(secret, cheat)?;
    let mut support = [T::zero(); 4];
    let (mut before, mut after) = (T::zero(), T::zero());
    let mut adversary_marginals: Vec<(Party, [T; 2])> = cheat
        .cheaters()
        .iter()
        .map(|(p, _)| (*p, [T::zero(); 2]))
        .collect();
    for br in &branches {
        let k = br.ancilla_outcome.index();
        support[k] = support[k] + br.probability;
        before = before + br.probability * br.fidelity_before_correction;
        after = after + br.probability * br.fidelity_recovered;
        for (slot, adv) in adversary_marginals.iter_mut().zip(&br.adversary) {
            slot.1[adv.outcome] = slot.1[adv.outcome] + br.probability;
        }
    }
    Ok(ExactSummary {
        distribution: ExactDistribution {
            support,
            conditioning: describe(cheat),
        },
        mean_fidelity_before_correction: before,
        mean_fidelity_after_correction: after,
        adversary_marginals,
        branches,
    })
}

pub fn exact_outcome_distribution<T: Real>(
    secret: &Secret<T>,
    cheat: &CheatModel<T>,
) -> Result<ExactDistribution<T>> {
    exact_summary(secret, cheat).map(|s| s.distribution)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Agreement {
    Match,
    MatchUpToNormalization,
    Mismatch,
}

impl fmt::Display for Agreement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Agreement::Match => "match",
            Agreement::MatchUpToNormalization => "match-up-to-normalization",
            Agreement::Mismatch => "mismatch",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiscrepancyReport<T> {
    pub label: PaperLabel,
    /// Largest deviation between the verbatim closed form and the
    /// phase-aligned simulator state.
    pub max_amp_delta: T,
    /// Fidelity against the renormalized closed form (0 if it vanishes).
    pub fidelity_after_renorm: T,
    pub verdict: Agreement,
}

/// Rotates `sim` by the global phase that best aligns it with `target`.
fn align<T: Real>(sim: &[Complex<T>], target: &[Complex<T>]) -> Vec<Complex<T>> {
    let overlap = sim
        .iter()
        .zip(target)
        .fold(Complex::new(T::zero(), T::zero()), |acc, (s, t)| {
            acc + s.conj() * t
        });
    let phase = if overlap.norm() > T::epsilon() {
        overlap / overlap.norm()
    } else {
        Complex::new(T::one(), T::zero())
    };
    sim.iter().map(|s| s * phase).collect()
}

fn max_delta<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> T {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(T::zero(), T::max)
}

pub fn compare<T: Real>(sim: &PureState<T>, paper: &PaperState<T>) -> Result<DiscrepancyReport<T>> {
    if sim.dim() != paper.amplitudes.len() {
        return Err(Error::DimensionMismatch {
            left: sim.n_qubits(),
            right: paper.amplitudes.len().trailing_zeros() as usize,
        });
    }
    let raw = &paper.amplitudes;
    let max_amp_delta = max_delta(&align(sim.amplitudes(), raw), raw);
    let renorm = paper.to_state().ok();
    let fidelity_after_renorm = match &renorm {
        Some(p) => sim.fidelity(p)?,
        None => T::zero(),
    };
    let verdict = if max_amp_delta <= T::CHAIN_TOL {
        Agreement::Match
    } else {
        match renorm {
            Some(p)
                if max_delta(&align(sim.amplitudes(), p.amplitudes()), p.amplitudes())
                    <= T::CHAIN_TOL =>
            {
                Agreement::MatchUpToNormalization
            }
            _ => Agreement::Mismatch,
        }
    };
    Ok(DiscrepancyReport {
        label: paper.label,
        max_amp_delta,
        fidelity_after_renorm,
        verdict,
    })
}
