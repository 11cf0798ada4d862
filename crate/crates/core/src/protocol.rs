//! The three-party sharing protocol.
//!
//! Qubit 0 is Alice's share, qubit 1 Bob's and qubit 2 Charlie's. The dealer
//! encodes `|ψ⟩|1⟩|1⟩` into `ψ3`, each party applies a Hadamard on receipt,
//! cheaters may measure their share beforehand, and Alice reconstructs with
//! two CNOTs, a Toffoli, H and Z before reading the ancilla pair.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::statevec::{Gate, PureState, SingleQubitBasis};

pub const ALICE: usize = 0;
pub const BOB: usize = 1;
pub const CHARLIE: usize = 2;
pub const ANCILLA: [usize; 2] = [BOB, CHARLIE];

/// Single-qubit secret `α|0⟩ + β|1⟩`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Secret<T> {
    alpha: Complex<T>,
    beta: Complex<T>,
}

impl<T: Real> Secret<T> {
    pub fn new(alpha: Complex<T>, beta: Complex<T>) -> Result<Self> {
        let norm = alpha.norm_sqr() + beta.norm_sqr();
        if !norm.is_finite() || (norm - T::one()).abs() > T::EXACT_TOL {
            return Err(Error::InvalidSecret(norm.as_f64()));
        }
        Ok(Self { alpha, beta })
    }

    pub fn real(alpha: T, beta: T) -> Result<Self> {
        Self::new(
            Complex::new(alpha, T::zero()),
            Complex::new(beta, T::zero()),
        )
    }

    /// `α = cos(θ/2)`, `β = e^{iφ} sin(θ/2)`.
    pub fn from_polar(theta: T, phi: T) -> Self {
        let half = theta / T::lit(2.0);
        Self {
            alpha: Complex::new(half.cos(), T::zero()),
            beta: Complex::from_polar(half.sin(), phi),
        }
    }

    pub fn alpha(&self) -> Complex<T> {
        self.alpha
    }

    pub fn beta(&self) -> Complex<T> {
        self.beta
    }

    pub fn state(&self) -> PureState<T> {
        PureState::qubit(self.alpha, self.beta).expect("secret is normalized")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Party {
    Bob,
    Charlie,
}

impl Party {
    pub fn qubit(self) -> usize {
        match self {
            Party::Bob => BOB,
            Party::Charlie => CHARLIE,
        }
    }
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Party::Bob => "bob",
            Party::Charlie => "charlie",
        })
    }
}

/// Which parties measure their share, and in which basis. `None` is honest.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CheatModel<T> {
    pub bob: Option<SingleQubitBasis<T>>,
    pub charlie: Option<SingleQubitBasis<T>>,
}

impl<T: Real> CheatModel<T> {
    pub fn honest() -> Self {
        Self {
            bob: None,
            charlie: None,
        }
    }

    pub fn bob(basis: SingleQubitBasis<T>) -> Self {
        Self {
            bob: Some(basis),
            charlie: None,
        }
    }

    pub fn charlie(basis: SingleQubitBasis<T>) -> Self {
        Self {
            bob: None,
            charlie: Some(basis),
        }
    }

    pub fn both(bob: SingleQubitBasis<T>, charlie: SingleQubitBasis<T>) -> Self {
        Self {
            bob: Some(bob),
            charlie: Some(charlie),
        }
    }

    pub fn single(party: Party, basis: SingleQubitBasis<T>) -> Self {
        match party {
            Party::Bob => Self::bob(basis),
            Party::Charlie => Self::charlie(basis),
        }
    }

    /// Cheating parties in draw order: Bob before Charlie.
    pub fn cheaters(&self) -> Vec<(Party, SingleQubitBasis<T>)> {
        [(Party::Bob, self.bob), (Party::Charlie, self.charlie)]
            .into_iter()
            .filter_map(|(p, b)| b.map(|b| (p, b)))
            .collect()
    }

    pub fn is_honest(&self) -> bool {
        self.bob.is_none() && self.charlie.is_none()
    }
}

/// Two-bit reading of the (Bob, Charlie) qubits, Bob's bit first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AncillaOutcome(u8);

impl AncillaOutcome {
    pub const ALL: [AncillaOutcome; 4] = [
        AncillaOutcome(0),
        AncillaOutcome(1),
        AncillaOutcome(2),
        AncillaOutcome(3),
    ];

    pub fn new(bits: u8) -> Result<Self> {
        if bits > 3 {
            return Err(Error::InvalidOutcome(bits as usize));
        }
        Ok(Self(bits))
    }

    pub fn bits(self) -> u8 {
        self.0
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for AncillaOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:02b}", self.0)
    }
}

impl FromStr for AncillaOutcome {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "00" => Ok(Self(0)),
            "01" => Ok(Self(1)),
            "10" => Ok(Self(2)),
            "11" => Ok(Self(3)),
            _ => Err(Error::MalformedOutcome(s.to_string())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Verdict {
    NoCheat,
    BobCheated,
    CharlieCheated,
    BothCheated,
}

impl Verdict {
    pub const ALL: [Verdict; 4] = [
        Verdict::NoCheat,
        Verdict::BobCheated,
        Verdict::CharlieCheated,
        Verdict::BothCheated,
    ];

    pub fn from_outcome(outcome: AncillaOutcome) -> Self {
        match outcome.bits() {
            0b11 => Verdict::NoCheat,
            0b01 => Verdict::BobCheated,
            0b10 => Verdict::CharlieCheated,
            _ => Verdict::BothCheated,
        }
    }

    pub fn outcome(self) -> AncillaOutcome {
        AncillaOutcome(match self {
            Verdict::NoCheat => 0b11,
            Verdict::BobCheated => 0b01,
            Verdict::CharlieCheated => 0b10,
            Verdict::BothCheated => 0b00,
        })
    }

    pub fn needs_correction(self) -> bool {
        self != Verdict::NoCheat
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

pub fn verdict_from_outcome(outcome: &str) -> Result<Verdict> {
    outcome.parse().map(Verdict::from_outcome)
}

/// Label of a recorded snapshot. `Collapsed` is the distributed state right
/// after the cheaters' measurements.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StateLabel {
    Psi(u8),
    Collapsed,
}

impl fmt::Display for StateLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateLabel::Psi(k) => write!(f, "psi{k}"),
            StateLabel::Collapsed => f.write_str("psi3_collapsed"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot<T> {
    pub label: StateLabel,
    pub state: PureState<T>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdversaryOutcome<T> {
    pub party: Party,
    /// 0 ↦ |γ⟩, 1 ↦ |γ⊥⟩.
    pub outcome: usize,
    pub probability: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolTranscript<T> {
    pub secret: Secret<T>,
    pub cheat: CheatModel<T>,
    pub snapshots: Vec<Snapshot<T>>,
    pub adversary_outcomes: Vec<AdversaryOutcome<T>>,
    pub ancilla_outcome: AncillaOutcome,
    pub verdict: Verdict,
    pub correction_applied: bool,
    /// Alice's qubit after the conditional corrective phase.
    pub recovered: PureState<T>,
    pub fidelity_before_correction: T,
    pub fidelity_recovered: T,
}

impl<T: Real> ProtocolTranscript<T> {
    pub fn snapshot(&self, label: StateLabel) -> Option<&PureState<T>> {
        self.snapshots
            .iter()
            .find(|s| s.label == label)
            .map(|s| &s.state)
    }
}

/// Dealer circuit up to `ψ3`, returning `[ψ0, ψ1, ψ2, ψ3]`.
pub fn encode_with_snapshots<T: Real>(secret: &Secret<T>) -> [PureState<T>; 4] {
    let ancillas = PureState::basis(2, 0b11).expect("two-qubit basis state");
    let psi0 = secret.state().tensor(&ancillas).expect("three qubits");
    let psi1 = psi0.apply(&Gate::H(ALICE)).expect("valid gate");
    let psi2 = psi1
        .apply_all(&[Gate::cnot(ALICE, BOB), Gate::cnot(ALICE, CHARLIE)])
        .expect("valid gates");
    let psi3 = psi2
        .apply_all(&[Gate::H(ALICE), Gate::H(BOB), Gate::H(CHARLIE)])
        .expect("valid gates");
    [psi0, psi1, psi2, psi3]
}

/// The distributed state `ψ3`.
pub fn encode<T: Real>(secret: &Secret<T>) -> PureState<T> {
    let [_, _, _, psi3] = encode_with_snapshots(secret);
    psi3
}

fn expect_three<T: Real>(state: &PureState<T>) -> Result<()> {
    if state.n_qubits() != 3 {
        return Err(Error::Arity {
            expected: 3,
            actual: state.n_qubits(),
        });
    }
    Ok(())
}

/// Each party's Hadamard on receipt of their share.
pub fn party_hadamards<T: Real>(state: &PureState<T>) -> Result<PureState<T>> {
    expect_three(state)?;
    state.apply_all(&[Gate::H(ALICE), Gate::H(BOB), Gate::H(CHARLIE)])
}

/// Cheaters measure their shares in their chosen basis and put the observed
/// basis state back. One draw per cheater, Bob first.
pub fn apply_cheat<T: Real>(
    state: &PureState<T>,
    cheat: &CheatModel<T>,
    draws: &[T],
) -> Result<(PureState<T>, Vec<AdversaryOutcome<T>>)> {
    expect_three(state)?;
    let cheaters = cheat.cheaters();
    if draws.len() != cheaters.len() {
        return Err(Error::DrawCount {
            expected: cheaters.len(),
            actual: draws.len(),
        });
    }
    let mut current = state.clone();
    let mut outcomes = Vec::with_capacity(cheaters.len());
    for ((party, basis), &draw) in cheaters.into_iter().zip(draws) {
        let m = current.measure(party.qubit(), &basis, draw)?;
        outcomes.push(AdversaryOutcome {
            party,
            outcome: m.outcome,
            probability: m.probability,
        });
        current = m.post_state;
    }
    Ok((current, outcomes))
}

/// Like [`apply_cheat`] but forces each cheater's outcome; the returned
/// weight is the joint Born probability of that branch.
pub fn force_cheat<T: Real>(
    state: &PureState<T>,
    cheat: &CheatModel<T>,
    outcomes: &[usize],
) -> Result<(PureState<T>, Vec<AdversaryOutcome<T>>, T)> {
    expect_three(state)?;
    let cheaters = cheat.cheaters();
    if outcomes.len() != cheaters.len() {
        return Err(Error::DrawCount {
            expected: cheaters.len(),
            actual: outcomes.len(),
        });
    }
    let mut current = state.clone();
    let mut weight = T::one();
    let mut recorded = Vec::with_capacity(cheaters.len());
    for ((party, basis), &outcome) in cheaters.into_iter().zip(outcomes) {
        let m = current.project(party.qubit(), &basis, outcome)?;
        weight = weight * m.probability;
        recorded.push(AdversaryOutcome {
            party,
            outcome,
            probability: m.probability,
        });
        current = m.post_state;
    }
    Ok((current, recorded, weight))
}

/// Deterministic path through the protocol with forced adversary outcomes:
/// joint Born weight, the collapsed distributed state, and `ψ8`.
pub fn forced_branch<T: Real>(
    secret: &Secret<T>,
    cheat: &CheatModel<T>,
    outcomes: &[usize],
) -> Result<(T, PureState<T>, PureState<T>)> {
    let (collapsed, _, weight) = force_cheat(&encode(secret), cheat, outcomes)?;
    let (psi8, _) = reconstruct(&party_hadamards(&collapsed)?)?;
    Ok((weight, collapsed, psi8))
}

/// Alice's reconstruction circuit applied to `ψ4`; returns `ψ8` and the
/// snapshots `ψ5..ψ8`.
pub fn reconstruct<T: Real>(state: &PureState<T>) -> Result<(PureState<T>, Vec<Snapshot<T>>)> {
    expect_three(state)?;
    let steps: [(u8, &[Gate]); 4] = [
        (5, &[Gate::cnot(ALICE, BOB), Gate::cnot(ALICE, CHARLIE)]),
        (6, &[Gate::toffoli(BOB, CHARLIE, ALICE)]),
        (7, &[Gate::H(ALICE)]),
        (8, &[Gate::Z(ALICE)]),
    ];
    let mut current = state.clone();
    let mut snapshots = Vec::with_capacity(steps.len());
    for (label, gates) in steps {
        current = current.apply_all(gates)?;
        snapshots.push(Snapshot {
            label: StateLabel::Psi(label),
            state: current.clone(),
        });
    }
    Ok((current, snapshots))
}

/// Extra phase gate on Alice's qubit.
pub fn corrective_phase<T: Real>(state: &PureState<T>) -> PureState<T> {
    state
        .apply(&Gate::Z(ALICE))
        .expect("every state has qubit 0")
}

/// Alice's qubit conditioned on the ancilla reading `outcome`, with the
/// branch probability.
pub fn alice_conditional<T: Real>(
    state: &PureState<T>,
    outcome: AncillaOutcome,
) -> Result<(T, PureState<T>)> {
    expect_three(state)?;
    let m = state.project_computational(&ANCILLA, outcome.index())?;
    let post = m.post_state;
    let alice = PureState::normalized(vec![
        post.amplitude(outcome.index()),
        post.amplitude(0b100 | outcome.index()),
    ])?;
    Ok((m.probability, alice))
}

/// Branch-resolved result of reading the ancillas of a final state.
#[derive(Clone, Debug, PartialEq)]
pub struct Resolution<T> {
    pub ancilla_outcome: AncillaOutcome,
    pub probability: T,
    pub verdict: Verdict,
    pub before_correction: PureState<T>,
    pub recovered: PureState<T>,
    pub fidelity_before_correction: T,
    pub fidelity_recovered: T,
}

/// Applies the verdict table and the correction policy to one ancilla branch.
pub fn resolve<T: Real>(
    psi8: &PureState<T>,
    outcome: AncillaOutcome,
    secret: &Secret<T>,
) -> Result<Resolution<T>> {
    let (probability, before) = alice_conditional(psi8, outcome)?;
    let verdict = Verdict::from_outcome(outcome);
    let recovered = if verdict.needs_correction() {
        corrective_phase(&before)
    } else {
        before.clone()
    };
    let target = secret.state();
    Ok(Resolution {
        ancilla_outcome: outcome,
        probability,
        verdict,
        fidelity_before_correction: before.fidelity(&target)?,
        fidelity_recovered: recovered.fidelity(&target)?,
        before_correction: before,
        recovered,
    })
}

/// Random stream for trial `trial` of an experiment seeded with `seed`.
/// ChaCha's stream selector makes each trial independent of run order.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

pub fn run_protocol<T: Real>(
    secret: &Secret<T>,
    cheat: &CheatModel<T>,
    rng_seed: u64,
) -> Result<ProtocolTranscript<T>> {
    run_protocol_with_rng(secret, cheat, &mut ChaCha8Rng::seed_from_u64(rng_seed))
}

fn draw<T: Real, R: Rng + ?Sized>(rng: &mut R) -> T {
    // Rounding to a narrower T can land exactly on 1.
    let d = T::lit(rng.gen::<f64>());
    if d >= T::one() {
        T::one() - T::epsilon()
    } else {
        d
    }
}

/// Full protocol run. Draws are consumed in the order Bob, Charlie, ancilla.
pub fn run_protocol_with_rng<T: Real, R: Rng + ?Sized>(
    secret: &Secret<T>,
    cheat: &CheatModel<T>,
    rng: &mut R,
) -> Result<ProtocolTranscript<T>> {
    let [psi0, psi1, psi2, psi3] = encode_with_snapshots(secret);
    let mut snapshots: Vec<Snapshot<T>> = [psi0, psi1, psi2, psi3.clone()]
        .into_iter()
        .enumerate()
        .map(|(k, state)| Snapshot {
            label: StateLabel::Psi(k as u8),
            state,
        })
        .collect();

    let draws: Vec<T> = cheat.cheaters().iter().map(|_| draw(rng)).collect();
    let (distributed, adversary_outcomes) = apply_cheat(&psi3, cheat, &draws)?;
    if !cheat.is_honest() {
        snapshots.push(Snapshot {
            label: StateLabel::Collapsed,
            state: distributed.clone(),
        });
    }

    let psi4 = party_hadamards(&distributed)?;
    snapshots.push(Snapshot {
        label: StateLabel::Psi(4),
        state: psi4.clone(),
    });
    let (psi8, tail) = reconstruct(&psi4)?;
    snapshots.extend(tail);

    let reading = psi8.measure_computational(&ANCILLA, draw(rng))?;
    let ancilla_outcome = AncillaOutcome::new(reading.outcome as u8)?;
    let resolution = resolve(&psi8, ancilla_outcome, secret)?;

    Ok(ProtocolTranscript {
        secret: *secret,
        cheat: *cheat,
        snapshots,
        adversary_outcomes,
        ancilla_outcome,
        verdict: resolution.verdict,
        correction_applied: resolution.verdict.needs_correction(),
        recovered: resolution.recovered,
        fidelity_before_correction: resolution.fidelity_before_correction,
        fidelity_recovered: resolution.fidelity_recovered,
    })
}
