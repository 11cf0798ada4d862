//! Nine-qubit Shor code: encoding, single-qubit error injection, projective
//! syndrome extraction and table-lookup recovery.
//!
//! Qubits are grouped in blocks `{0,1,2}`, `{3,4,5}`, `{6,7,8}`. The
//! stabilizer generators are the six neighbouring Z-parities inside each
//! block and the two X-parities over blocks 0–1 and 1–2. Syndromes are read
//! by projecting the 9-qubit state onto each generator's ±1 eigenspace.

use std::fmt;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::protocol::Secret;
use crate::scalar::Real;
use crate::statevec::{is_unitary, Gate, Matrix2, PureState, SingleQubitBasis};

pub const CODE_QUBITS: usize = 9;
const BLOCKS: [[usize; 3]; 3] = [[0, 1, 2], [3, 4, 5], [6, 7, 8]];
const Z_PAIRS: [(usize, usize); 6] = [(0, 1), (1, 2), (3, 4), (4, 5), (6, 7), (7, 8)];

#[derive(Clone, Debug, PartialEq)]
pub struct ShorCodeword<T> {
    pub state: PureState<T>,
    pub logical: Option<Secret<T>>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ErrorKind<T> {
    PauliX,
    PauliY,
    PauliZ,
    Unitary(Matrix2<T>),
    /// Projective measurement with replacement, as performed by a cheater.
    Measure {
        basis: SingleQubitBasis<T>,
        draw: T,
    },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorSpec<T> {
    kind: ErrorKind<T>,
    qubit: usize,
}

impl<T: Real> ErrorSpec<T> {
    pub fn new(kind: ErrorKind<T>, qubit: usize) -> Result<Self> {
        if qubit >= CODE_QUBITS {
            return Err(Error::QubitIndex {
                qubit,
                n_qubits: CODE_QUBITS,
            });
        }
        if let ErrorKind::Unitary(m) = &kind {
            if !is_unitary(m, T::EXACT_TOL) {
                return Err(Error::NotUnitary);
            }
        }
        Ok(Self { kind, qubit })
    }

    pub fn kind(&self) -> &ErrorKind<T> {
        &self.kind
    }

    pub fn qubit(&self) -> usize {
        self.qubit
    }
}

impl<T: Real> fmt::Display for ErrorSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ErrorKind::PauliX => write!(f, "X:{}", self.qubit),
            ErrorKind::PauliY => write!(f, "Y:{}", self.qubit),
            ErrorKind::PauliZ => write!(f, "Z:{}", self.qubit),
            ErrorKind::Unitary(_) => write!(f, "U:{}", self.qubit),
            ErrorKind::Measure { basis, .. } => {
                let deg = basis.b().re.atan2(basis.a().re).to_degrees();
                write!(f, "measure:{}:{}", self.qubit, deg)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Syndrome {
    /// Z-parities over `(0,1),(1,2),(3,4),(4,5),(6,7),(7,8)`; set means −1.
    pub z_bits: [bool; 6],
    /// X-parities over qubits 0–5 and 3–8.
    pub x_bits: [bool; 2],
}

impl Syndrome {
    pub fn is_trivial(&self) -> bool {
        !self.z_bits.iter().chain(&self.x_bits).any(|&b| b)
    }

    fn set(&mut self, generator: usize, bit: bool) {
        if generator < 6 {
            self.z_bits[generator] = bit;
        } else {
            self.x_bits[generator - 6] = bit;
        }
    }
}

impl fmt::Display for Syndrome {
    /// `zzzzzz/xx`, e.g. `110000/00`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.z_bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        f.write_str("/")?;
        for &b in &self.x_bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Pauli product with no Y factors, as bit masks over basis indices.
#[derive(Clone, Copy, Debug)]
struct PauliString {
    x_mask: usize,
    z_mask: usize,
}

fn bit(qubit: usize) -> usize {
    1 << (CODE_QUBITS - 1 - qubit)
}

fn generators() -> [PauliString; 8] {
    let mut g = [PauliString {
        x_mask: 0,
        z_mask: 0,
    }; 8];
    for (k, &(a, b)) in Z_PAIRS.iter().enumerate() {
        g[k].z_mask = bit(a) | bit(b);
    }
    g[6].x_mask = (0..6).map(bit).fold(0, |m, b| m | b);
    g[7].x_mask = (3..9).map(bit).fold(0, |m, b| m | b);
    g
}

impl PauliString {
    fn apply<T: Real>(&self, amps: &[Complex<T>]) -> Vec<Complex<T>> {
        let mut out = vec![Complex::new(T::zero(), T::zero()); amps.len()];
        for (i, &a) in amps.iter().enumerate() {
            let sign = (i & self.z_mask).count_ones() % 2 == 1;
            out[i ^ self.x_mask] = if sign { -a } else { a };
        }
        out
    }
}

fn block_logical<T: Real>(sign: T) -> PureState<T> {
    let s = T::FRAC_1_SQRT_2();
    let mut amps = vec![Complex::new(T::zero(), T::zero()); 8];
    amps[0b000] = Complex::new(s, T::zero());
    amps[0b111] = Complex::new(sign * s, T::zero());
    PureState::from_amplitudes(amps).expect("normalized block")
}

/// `α|0_L⟩ + β|1_L⟩` with `|0_L⟩ = ((|000⟩+|111⟩)/√2)^⊗3` and
/// `|1_L⟩ = ((|000⟩−|111⟩)/√2)^⊗3`.
pub fn shor_encode<T: Real>(secret: &Secret<T>) -> ShorCodeword<T> {
    let tri = |sign: T| {
        let b = block_logical(sign);
        b.tensor(&b)
            .and_then(|bb| bb.tensor(&b))
            .expect("nine qubits")
    };
    let (zero, one) = (tri(T::one()), tri(-T::one()));
    let amps = zero
        .amplitudes()
        .iter()
        .zip(one.amplitudes())
        .map(|(z, o)| secret.alpha() * z + secret.beta() * o)
        .collect();
    ShorCodeword {
        state: PureState::from_amplitudes(amps).expect("logical states are orthonormal"),
        logical: Some(*secret),
    }
}

/// The textbook encoding circuit: phase-flip layer on qubits 0, 3, 6 then a
/// bit-flip layer inside each block. Input is the secret on qubit 0.
pub fn encoding_circuit() -> Vec<Gate> {
    let mut gates = vec![
        Gate::cnot(0, 3),
        Gate::cnot(0, 6),
        Gate::H(0),
        Gate::H(3),
        Gate::H(6),
    ];
    for [head, a, b] in BLOCKS {
        gates.push(Gate::cnot(head, a));
        gates.push(Gate::cnot(head, b));
    }
    gates
}

fn pauli_matrix<T: Real>(kind: &ErrorKind<T>) -> Option<Matrix2<T>> {
    let (o, l, i) = (
        Complex::new(T::zero(), T::zero()),
        Complex::new(T::one(), T::zero()),
        Complex::new(T::zero(), T::one()),
    );
    match kind {
        ErrorKind::PauliX => Some([[o, l], [l, o]]),
        ErrorKind::PauliY => Some([[o, -i], [i, o]]),
        ErrorKind::PauliZ => Some([[l, o], [o, -l]]),
        ErrorKind::Unitary(m) => Some(*m),
        ErrorKind::Measure { .. } => None,
    }
}

/// Applies `err` to the codeword; for measurements also returns the outcome.
pub fn inject_error_traced<T: Real>(
    cw: &ShorCodeword<T>,
    err: &ErrorSpec<T>,
) -> Result<(ShorCodeword<T>, Option<usize>)> {
    expect_nine(&cw.state)?;
    let (state, outcome) = match (&err.kind, pauli_matrix(&err.kind)) {
        (_, Some(m)) => (cw.state.apply_matrix(err.qubit, &m)?, None),
        (ErrorKind::Measure { basis, draw }, None) => {
            let r = cw.state.measure(err.qubit, basis, *draw)?;
            (r.post_state, Some(r.outcome))
        }
        _ => unreachable!("only measurements lack a matrix"),
    };
    Ok((
        ShorCodeword {
            state,
            logical: cw.logical,
        },
        outcome,
    ))
}

pub fn inject_error<T: Real>(cw: &ShorCodeword<T>, err: &ErrorSpec<T>) -> Result<ShorCodeword<T>> {
    inject_error_traced(cw, err).map(|(c, _)| c)
}

fn expect_nine<T: Real>(state: &PureState<T>) -> Result<()> {
    if state.n_qubits() != CODE_QUBITS {
        return Err(Error::Arity {
            expected: CODE_QUBITS,
            actual: state.n_qubits(),
        });
    }
    Ok(())
}

/// Splits `amps` into the `(+1, −1)` eigenspace components of `g`, each
/// with its squared norm.
fn split<T: Real>(g: &PauliString, amps: &[Complex<T>]) -> [(T, Vec<Complex<T>>); 2] {
    let half = T::lit(0.5);
    let ga = g.apply(amps);
    let mut plus = Vec::with_capacity(amps.len());
    let mut minus = Vec::with_capacity(amps.len());
    for (a, b) in amps.iter().zip(&ga) {
        plus.push((a + b).scale(half));
        minus.push((a - b).scale(half));
    }
    let norm = |v: &[Complex<T>]| v.iter().map(|a| a.norm_sqr()).sum::<T>();
    [(norm(&plus), plus), (norm(&minus), minus)]
}

fn negligible<T: Real>() -> T {
    T::epsilon() * T::lit(64.0)
}

fn renormalize<T: Real>(v: Vec<Complex<T>>, p: T) -> Vec<Complex<T>> {
    let s = T::one() / p.sqrt();
    v.into_iter().map(|a| a.scale(s)).collect()
}

/// Measures the eight generators in order, one draw each (half-open
/// intervals, +1 first).
pub fn measure_syndrome<T: Real>(
    cw: &ShorCodeword<T>,
    draws: &[T; 8],
) -> Result<(Syndrome, ShorCodeword<T>)> {
    expect_nine(&cw.state)?;
    let mut amps = cw.state.amplitudes().to_vec();
    let mut syndrome = Syndrome::default();
    for (k, (g, &draw)) in generators().iter().zip(draws).enumerate() {
        if !(draw >= T::zero() && draw < T::one()) {
            return Err(Error::InvalidDraw(draw.as_f64()));
        }
        let [(p_plus, plus), (p_minus, minus)] = split(g, &amps);
        let total = p_plus + p_minus;
        let flipped = draw * total >= p_plus;
        let (p, v) = if flipped {
            (p_minus, minus)
        } else {
            (p_plus, plus)
        };
        if p <= negligible::<T>() {
            return Err(Error::ZeroProbabilityBranch);
        }
        syndrome.set(k, flipped);
        amps = renormalize(v, p);
    }
    let state = PureState::from_amplitudes(amps)?;
    Ok((
        syndrome,
        ShorCodeword {
            state,
            logical: cw.logical,
        },
    ))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SyndromeBranch<T> {
    pub probability: T,
    pub syndrome: Syndrome,
    pub codeword: ShorCodeword<T>,
}

/// Every syndrome outcome with nonzero probability and its collapsed state.
pub fn syndrome_branches<T: Real>(cw: &ShorCodeword<T>) -> Result<Vec<SyndromeBranch<T>>> {
    expect_nine(&cw.state)?;
    let mut frontier = vec![(
        T::one(),
        Syndrome::default(),
        cw.state.amplitudes().to_vec(),
    )];
    for (k, g) in generators().iter().enumerate() {
        let mut next = Vec::with_capacity(frontier.len() * 2);
        for (weight, syn, amps) in frontier {
            let parts = split(g, &amps);
            for (flipped, (p, v)) in [false, true].into_iter().zip(parts) {
                if p <= negligible::<T>() {
                    continue;
                }
                let mut s = syn;
                s.set(k, flipped);
                next.push((weight * p, s, renormalize(v, p)));
            }
        }
        frontier = next;
    }
    frontier
        .into_iter()
        .map(|(probability, syndrome, amps)| {
            Ok(SyndromeBranch {
                probability,
                syndrome,
                codeword: ShorCodeword {
                    state: PureState::from_amplitudes(amps)?,
                    logical: cw.logical,
                },
            })
        })
        .collect()
}

/// Pauli correction chosen for a syndrome.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Correction {
    /// Qubit receiving X.
    pub bit_flip: Option<usize>,
    /// Qubit receiving Z (always the first qubit of the flagged block).
    pub phase_flip: Option<usize>,
}

/// Z-parity pattern `(first pair, second pair)` within a block to the
/// position of the flipped qubit.
fn flipped_in_block(pattern: (bool, bool)) -> Option<usize> {
    match pattern {
        (false, false) => None,
        (true, false) => Some(0),
        (true, true) => Some(1),
        (false, true) => Some(2),
    }
}

pub fn correction_for(syn: &Syndrome) -> Result<Correction> {
    let uncorrectable = || Error::UncorrectableSyndrome(syn.to_string());
    let mut bit_flip = None;
    for (block, qubits) in BLOCKS.iter().enumerate() {
        let pattern = (syn.z_bits[2 * block], syn.z_bits[2 * block + 1]);
        if let Some(pos) = flipped_in_block(pattern) {
            if bit_flip.is_some() {
                return Err(uncorrectable());
            }
            bit_flip = Some(qubits[pos]);
        }
    }
    let phase_block = match (syn.x_bits[0], syn.x_bits[1]) {
        (false, false) => None,
        (true, false) => Some(0),
        (true, true) => Some(1),
        (false, true) => Some(2),
    };
    if let (Some(q), Some(block)) = (bit_flip, phase_block) {
        if q / 3 != block {
            return Err(uncorrectable());
        }
    }
    Ok(Correction {
        bit_flip,
        phase_flip: phase_block.map(|b| BLOCKS[b][0]),
    })
}

pub fn recover<T: Real>(cw: &ShorCodeword<T>, syn: &Syndrome) -> Result<ShorCodeword<T>> {
    expect_nine(&cw.state)?;
    let fix = correction_for(syn)?;
    let mut state = cw.state.clone();
    if let Some(q) = fix.bit_flip {
        state = state.apply(&Gate::X(q))?;
    }
    if let Some(q) = fix.phase_flip {
        state = state.apply(&Gate::Z(q))?;
    }
    Ok(ShorCodeword {
        state,
        logical: cw.logical,
    })
}

pub fn logical_fidelity<T: Real>(cw: &ShorCodeword<T>, secret: &Secret<T>) -> Result<T> {
    cw.state.fidelity(&shor_encode(secret).state)
}
