//! Signed Pauli operators in binary-symplectic form and normalized Pauli-sum
//! Hamiltonians.
//!
//! A term is stored as two bit masks `(x, z)` plus a sign, and represents
//!
//!   sign · ⊗ⱼ i^{xⱼ zⱼ} X^{xⱼ} Z^{zⱼ}
//!
//! which is Hermitian with eigenvalues ±1 (so `Y = iXZ`).
//!
//! Qubit ordering: qubit 0 is the leftmost character of a Pauli string and the
//! most significant bit of a computational-basis index. The mask bit for qubit
//! `j` is therefore `1 << (n - 1 - j)`, which lets masks act on basis indices
//! directly.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{Complex64, StateVec};

/// Largest register a term can describe (masks are `u64`).
pub const MAX_QUBITS: usize = 64;

/// Largest register for which dense matrices are built.
pub const DENSE_QUBIT_LIMIT: usize = 12;

/// Tolerance on `Σ coeff = 1`.
pub const NORMALIZATION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    fn of(value: f64) -> Sign {
        if value < 0.0 {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }
}

/// A signed n-qubit Pauli operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliTerm {
    n_qubits: usize,
    x: u64,
    z: u64,
    sign: Sign,
}

fn mask_limit(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl PauliTerm {
    pub fn new(n_qubits: usize, x: u64, z: u64, sign: Sign) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::Domain("a Pauli term needs at least one qubit".into()));
        }
        if n_qubits > MAX_QUBITS {
            return Err(Error::SizeGuard {
                what: "qubits per Pauli term",
                limit: MAX_QUBITS,
                actual: n_qubits,
            });
        }
        let limit = mask_limit(n_qubits);
        if x & !limit != 0 || z & !limit != 0 {
            return Err(Error::Domain(format!(
                "symplectic masks exceed {n_qubits} qubits"
            )));
        }
        Ok(PauliTerm {
            n_qubits,
            x,
            z,
            sign,
        })
    }

    pub fn identity(n_qubits: usize) -> Result<Self> {
        Self::new(n_qubits, 0, 0, Sign::Plus)
    }

    /// Builds a term from a string over `{I, X, Y, Z}`; qubit 0 is leftmost.
    pub fn from_label(label: &str) -> Result<Self> {
        let n = label.chars().count();
        let mut x = 0u64;
        let mut z = 0u64;
        for (j, ch) in label.chars().enumerate() {
            let (xb, zb) = match ch {
                'I' => (0, 0),
                'X' => (1, 0),
                'Y' => (1, 1),
                'Z' => (0, 1),
                other => {
                    return Err(Error::Parse {
                        line: 1,
                        column: j + 1,
                        message: format!("unexpected Pauli letter {other:?}"),
                    })
                }
            };
            if n <= MAX_QUBITS {
                let bit = 1u64 << (n - 1 - j);
                if xb == 1 {
                    x |= bit;
                }
                if zb == 1 {
                    z |= bit;
                }
            }
        }
        Self::new(n, x, z, Sign::Plus)
    }

    /// Single-qubit operator `letter` on `qubit`, identity elsewhere.
    pub fn single(n_qubits: usize, qubit: usize, letter: char) -> Result<Self> {
        Self::product(n_qubits, &[(qubit, letter)])
    }

    /// Product of single-qubit letters on distinct qubits.
    pub fn product(n_qubits: usize, factors: &[(usize, char)]) -> Result<Self> {
        let mut label = vec!['I'; n_qubits];
        for &(q, letter) in factors {
            if q >= n_qubits {
                return Err(Error::QubitMismatch {
                    expected: n_qubits,
                    found: q + 1,
                });
            }
            label[q] = letter;
        }
        Self::from_label(&label.into_iter().collect::<String>())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn with_sign(mut self, sign: Sign) -> Self {
        self.sign = sign;
        self
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// X-part as a bitstring, qubit 0 first.
    pub fn x_bits(&self) -> String {
        self.bits(self.x)
    }

    /// Z-part as a bitstring, qubit 0 first.
    pub fn z_bits(&self) -> String {
        self.bits(self.z)
    }

    fn bits(&self, mask: u64) -> String {
        (0..self.n_qubits)
            .map(|j| {
                if mask >> (self.n_qubits - 1 - j) & 1 == 1 {
                    '1'
                } else {
                    '0'
                }
            })
            .collect()
    }

    /// Pauli string without the sign.
    pub fn label(&self) -> String {
        (0..self.n_qubits)
            .map(|j| {
                let shift = self.n_qubits - 1 - j;
                match (self.x >> shift & 1, self.z >> shift & 1) {
                    (0, 0) => 'I',
                    (1, 0) => 'X',
                    (1, 1) => 'Y',
                    _ => 'Z',
                }
            })
            .collect()
    }

    /// Scalar multiplying `|b ⊕ x⟩` in `P|b⟩`, including the stored sign.
    ///
    /// P|b⟩ = sign · i^{|x∧z|} · (−1)^{|b∧z|} |b ⊕ x⟩
    #[inline]
    pub(crate) fn phase_on(&self, basis: usize) -> Complex64 {
        let parity = ((basis as u64) & self.z).count_ones() & 1;
        let mut value = self.y_phase() * self.sign.value();
        if parity == 1 {
            value = -value;
        }
        value
    }

    /// `sign · i^{|x∧z|}`, the basis-independent part of the phase.
    #[inline]
    pub(crate) fn y_phase(&self) -> Complex64 {
        match (self.x & self.z).count_ones() % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }

    /// Dense `2ⁿ × 2ⁿ` matrix of the signed operator.
    pub fn to_dense(&self) -> Result<DMatrix<Complex64>> {
        guard_dense(self.n_qubits)?;
        let dim = 1usize << self.n_qubits;
        let mut m = DMatrix::zeros(dim, dim);
        for col in 0..dim {
            let row = col ^ self.x as usize;
            m[(row, col)] = self.phase_on(col);
        }
        Ok(m)
    }
}

impl fmt::Display for PauliTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.sign {
            Sign::Plus => '+',
            Sign::Minus => '-',
        };
        write!(f, "{s}{}", self.label())
    }
}

fn guard_dense(n: usize) -> Result<()> {
    if n > DENSE_QUBIT_LIMIT {
        Err(Error::SizeGuard {
            what: "qubits for dense matrices",
            limit: DENSE_QUBIT_LIMIT,
            actual: n,
        })
    } else {
        Ok(())
    }
}

/// Exact action of a signed Pauli on a state.
pub fn apply_pauli(p: &PauliTerm, v: &StateVec) -> Result<StateVec> {
    if v.n_qubits() != p.n_qubits {
        return Err(Error::DimensionMismatch {
            expected: 1 << p.n_qubits.min(MAX_QUBITS - 1),
            found: v.len(),
        });
    }
    let amps = v.amps();
    let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
    let x = p.x as usize;
    for (b, &a) in amps.iter().enumerate() {
        out[b ^ x] = p.phase_on(b) * a;
    }
    StateVec::from_amps(out)
}

/// Normalized Hamiltonian `H = Σ coeffᵢ · signᵢ Pᵢ` with `Σ coeffᵢ = 1`.
///
/// `scale` is the ℓ1 norm of the original physical coefficients, so that
/// physical energies are normalized energies times `scale`.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSum {
    n_qubits: usize,
    terms: Vec<(f64, PauliTerm)>,
    scale: f64,
}

impl PauliSum {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[(f64, PauliTerm)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Physical-units coefficients `coeff · sign · scale` with unsigned terms.
    pub fn physical_terms(&self) -> Vec<(f64, PauliTerm)> {
        self.terms
            .iter()
            .map(|&(c, t)| (c * t.sign().value() * self.scale, t.with_sign(Sign::Plus)))
            .collect()
    }

    /// Renders the Hamiltonian in the text file format (physical units).
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (c, t) in self.physical_terms() {
            out.push_str(&format!("{c:e} {}\n", t.label()));
        }
        out
    }

    pub fn to_dense(&self) -> Result<DMatrix<Complex64>> {
        guard_dense(self.n_qubits)?;
        let dim = 1usize << self.n_qubits;
        let mut m = DMatrix::zeros(dim, dim);
        for &(c, t) in &self.terms {
            let x = t.x_mask() as usize;
            for col in 0..dim {
                m[(col ^ x, col)] += t.phase_on(col) * c;
            }
        }
        Ok(m)
    }

    pub fn from_text(text: &str) -> Result<PauliSum> {
        normalize(&parse_hamiltonian(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<PauliSum> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }
}

/// Merges duplicate operators, moves coefficient signs into the terms and
/// rescales to unit ℓ1 norm.
pub fn normalize(raw_terms: &[(f64, PauliTerm)]) -> Result<PauliSum> {
    let first = raw_terms.first().ok_or(Error::EmptyHamiltonian)?;
    let n = first.1.n_qubits();
    let mut order: Vec<(u64, u64)> = Vec::new();
    let mut signed: HashMap<(u64, u64), f64> = HashMap::new();
    let mut raw_l1 = 0.0;
    for &(c, t) in raw_terms {
        if t.n_qubits() != n {
            return Err(Error::QubitMismatch {
                expected: n,
                found: t.n_qubits(),
            });
        }
        if !c.is_finite() {
            return Err(Error::Domain(format!("non-finite coefficient {c}")));
        }
        raw_l1 += c.abs();
        let key = (t.x_mask(), t.z_mask());
        let entry = signed.entry(key).or_insert_with(|| {
            order.push(key);
            0.0
        });
        *entry += c * t.sign().value();
    }
    // Cancellation below this level is treated as exact.
    let cutoff = raw_l1 * 1e-14;
    let mut merged = Vec::with_capacity(order.len());
    for key in order {
        let c = signed[&key];
        if c.abs() > cutoff {
            merged.push((c, PauliTerm::new(n, key.0, key.1, Sign::of(c))?));
        }
    }
    let scale: f64 = merged.iter().map(|(c, _)| c.abs()).sum();
    if merged.is_empty() || scale == 0.0 {
        return Err(Error::EmptyHamiltonian);
    }
    let terms = merged
        .into_iter()
        .map(|(c, t)| (c.abs() / scale, t))
        .collect();
    Ok(PauliSum {
        n_qubits: n,
        terms,
        scale,
    })
}

/// Parses one `<float> <pauli-string>` line.
pub fn pauli_parse(text: &str) -> Result<(f64, PauliTerm)> {
    parse_line(text, 1)
}

fn parse_line(text: &str, line: usize) -> Result<(f64, PauliTerm)> {
    let err = |column: usize, message: String| Error::Parse {
        line,
        column,
        message,
    };
    let mut fields = Vec::new();
    let mut start = None;
    for (i, ch) in text.char_indices() {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                fields.push((s, &text[s..i]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        fields.push((s, &text[s..]));
    }
    let col = |byte: usize| text[..byte].chars().count() + 1;
    match fields.as_slice() {
        [(c0, coeff), (p0, pauli)] => {
            let c: f64 = coeff
                .parse()
                .map_err(|_| err(col(*c0), format!("invalid coefficient {coeff:?}")))?;
            if !c.is_finite() {
                return Err(err(col(*c0), format!("non-finite coefficient {coeff:?}")));
            }
            if pauli.chars().count() > MAX_QUBITS {
                return Err(err(
                    col(*p0),
                    format!("Pauli string longer than {MAX_QUBITS} qubits"),
                ));
            }
            let term = PauliTerm::from_label(pauli).map_err(|e| match e {
                Error::Parse {
                    column, message, ..
                } => err(col(*p0) + column - 1, message),
                other => other,
            })?;
            Ok((c, term))
        }
        [] => Err(err(1, "empty line".into())),
        [_] => Err(err(text.chars().count() + 1, "expected a Pauli string".into())),
        [_, _, (extra, _), ..] => Err(err(col(*extra), "unexpected trailing field".into())),
    }
}

/// Parses a Hamiltonian file: one term per line, `#` comments, blank lines
/// ignored. All terms must act on the same number of qubits.
pub fn parse_hamiltonian(text: &str) -> Result<Vec<(f64, PauliTerm)>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("");
        if body.trim().is_empty() {
            continue;
        }
        let (c, t) = parse_line(body, idx + 1)?;
        if let Some((_, first)) = out.first() {
            let first: &PauliTerm = first;
            if first.n_qubits() != t.n_qubits() {
                return Err(Error::Parse {
                    line: idx + 1,
                    column: 1,
                    message: format!(
                        "term acts on {} qubits, earlier terms on {}",
                        t.n_qubits(),
                        first.n_qubits()
                    ),
                });
            }
        }
        out.push((c, t));
    }
    if out.is_empty() {
        return Err(Error::EmptyHamiltonian);
    }
    Ok(out)
}

/// Random normalized sum of `n_terms` distinct Pauli operators with random
/// signs and magnitudes.
pub fn random_pauli_sum<R: Rng + ?Sized>(
    n_qubits: usize,
    n_terms: usize,
    rng: &mut R,
) -> Result<PauliSum> {
    if n_qubits == 0 || n_qubits > 16 {
        return Err(Error::Domain(format!(
            "random Pauli sums support 1..=16 qubits, got {n_qubits}"
        )));
    }
    let available = 1usize << (2 * n_qubits);
    if n_terms == 0 || n_terms > available {
        return Err(Error::Domain(format!(
            "cannot draw {n_terms} distinct Pauli terms on {n_qubits} qubits"
        )));
    }
    let limit = mask_limit(n_qubits);
    let mut seen = std::collections::HashSet::new();
    let mut raw = Vec::with_capacity(n_terms);
    while raw.len() < n_terms {
        let x = rng.random::<u64>() & limit;
        let z = rng.random::<u64>() & limit;
        if !seen.insert((x, z)) {
            continue;
        }
        let mag: f64 = rng.random_range(0.05..1.0);
        let sign = if rng.random::<bool>() {
            Sign::Plus
        } else {
            Sign::Minus
        };
        raw.push((mag, PauliTerm::new(n_qubits, x, z, sign)?));
    }
    normalize(&raw)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::StateVec;

    fn term(label: &str) -> PauliTerm {
        PauliTerm::from_label(label).unwrap()
    }

    #[test]
    fn normalize_symmetric_pair() {
        let h = normalize(&[(2.0, term("ZI")), (2.0, term("IZ"))]).unwrap();
        assert_eq!(h.len(), 2);
        assert_eq!(h.terms()[0].0, 0.5);
        assert_eq!(h.terms()[1].0, 0.5);
        assert_eq!(h.scale(), 4.0);
    }

    #[test]
    fn normalize_absorbs_negative_coefficient() {
        let h = normalize(&[(-3.0, term("X"))]).unwrap();
        assert_eq!(h.terms()[0].0, 1.0);
        assert_eq!(h.terms()[0].1.sign(), Sign::Minus);
        assert_eq!(h.scale(), 3.0);
    }

    #[test]
    fn normalize_merges_duplicates_and_opposite_signs() {
        let minus_x = term("XI").with_sign(Sign::Minus);
        let h = normalize(&[
            (1.0, term("XI")),
            (0.5, term("XI")),
            (2.0, minus_x),
            (1.0, term("IZ")),
        ])
        .unwrap();
        assert_eq!(h.len(), 2);
        let (c, t) = h.terms()[0];
        assert_eq!(t.label(), "XI");
        assert_eq!(t.sign(), Sign::Minus);
        assert!((c - 0.5 / 1.5).abs() < 1e-15);
        assert!((h.scale() - 1.5).abs() < 1e-15);
    }

    #[test]
    fn fully_cancelled_is_empty() {
        let err = normalize(&[(1.0, term("Z")), (-1.0, term("Z"))]).unwrap_err();
        assert!(matches!(err, Error::EmptyHamiltonian));
        assert!(matches!(
            normalize(&[(0.0, term("Z"))]).unwrap_err(),
            Error::EmptyHamiltonian
        ));
        assert!(matches!(normalize(&[]).unwrap_err(), Error::EmptyHamiltonian));
    }

    #[test]
    fn normalize_rejects_mixed_widths() {
        let err = normalize(&[(1.0, term("Z")), (1.0, term("ZZ"))]).unwrap_err();
        assert!(matches!(
            err,
            Error::QubitMismatch {
                expected: 1,
                found: 2
            }
        ));
    }

    #[test]
    fn parse_examples() {
        let (c, t) = pauli_parse("0.5 XZ").unwrap();
        assert_eq!(c, 0.5);
        assert_eq!((t.x_bits().as_str(), t.z_bits().as_str()), ("10", "01"));
        assert_eq!(t.sign(), Sign::Plus);

        let (c, t) = pauli_parse("-0.25 YI").unwrap();
        assert_eq!(c, -0.25);
        assert_eq!((t.x_bits().as_str(), t.z_bits().as_str()), ("10", "10"));
        assert_eq!(t.sign(), Sign::Plus);

        let (c, t) = pauli_parse("1.0 II").unwrap();
        assert_eq!(c, 1.0);
        assert!(t.is_identity());
    }

    #[test]
    fn parse_reports_positions() {
        match pauli_parse("0.5 XQ").unwrap_err() {
            Error::Parse { line, column, .. } => assert_eq!((line, column), (1, 6)),
            e => panic!("unexpected {e:?}"),
        }
        match pauli_parse("  abc XX").unwrap_err() {
            Error::Parse { column, .. } => assert_eq!(column, 3),
            e => panic!("unexpected {e:?}"),
        }
        assert!(pauli_parse("0.5").is_err());
        assert!(pauli_parse("0.5 XX YY").is_err());
        assert!(pauli_parse("nan XX").is_err());
    }

    #[test]
    fn parse_file_with_comments() {
        let text = "# header\n\n 1.0 XX  # coupling\n-2.0 ZZ\n";
        let terms = parse_hamiltonian(text).unwrap();
        assert_eq!(terms.len(), 2);
        let bad = "1.0 XX\n1.0 ZZZ\n";
        match parse_hamiltonian(bad).unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            e => panic!("unexpected {e:?}"),
        }
        match parse_hamiltonian("1.0 XX\n2.0 XB\n").unwrap_err() {
            Error::Parse { line, column, .. } => assert_eq!((line, column), (2, 6)),
            e => panic!("unexpected {e:?}"),
        }
        assert!(matches!(
            parse_hamiltonian("# nothing\n").unwrap_err(),
            Error::EmptyHamiltonian
        ));
    }

    #[test]
    fn text_roundtrip_preserves_operator() {
        let h = PauliSum::from_text("0.5 XZ\n-0.25 YI\n1.5 ZZ\n").unwrap();
        let again = PauliSum::from_text(&h.to_text()).unwrap();
        assert!((h.scale() - again.scale()).abs() < 1e-12);
        for (a, b) in h.terms().iter().zip(again.terms()) {
            assert_eq!(a.1, b.1);
            assert!((a.0 - b.0).abs() < 1e-12);
        }
    }

    #[test]
    fn single_qubit_actions() {
        let zero = StateVec::basis(1, 0).unwrap();
        let one = StateVec::basis(1, 1).unwrap();

        let out = apply_pauli(&term("X"), &zero).unwrap();
        assert_eq!(out.amps()[1], Complex64::new(1.0, 0.0));
        assert_eq!(out.amps()[0], Complex64::new(0.0, 0.0));

        let out = apply_pauli(&term("Z"), &one).unwrap();
        assert_eq!(out.amps()[1], Complex64::new(-1.0, 0.0));

        let out = apply_pauli(&term("Y"), &zero).unwrap();
        assert_eq!(out.amps()[1], Complex64::new(0.0, 1.0));
        assert_eq!(out.amps()[0], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn qubit_zero_is_most_significant() {
        // X on qubit 0 of two qubits maps |00> to |10> = index 2.
        let out = apply_pauli(&term("XI"), &StateVec::basis(2, 0).unwrap()).unwrap();
        assert_eq!(out.amps()[2], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn apply_rejects_wrong_width() {
        let err = apply_pauli(&term("XX"), &StateVec::basis(1, 0).unwrap()).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn new_rejects_out_of_range_masks() {
        assert!(PauliTerm::new(2, 0b100, 0, Sign::Plus).is_err());
        assert!(PauliTerm::new(0, 0, 0, Sign::Plus).is_err());
        assert!(PauliTerm::new(64, u64::MAX, 0, Sign::Plus).is_ok());
    }

    #[test]
    fn random_sums_are_normalized() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let h = random_pauli_sum(3, 8, &mut rng).unwrap();
            let total: f64 = h.terms().iter().map(|t| t.0).sum();
            assert!((total - 1.0).abs() < NORMALIZATION_TOL);
            assert_eq!(h.len(), 8);
        }
        assert!(random_pauli_sum(1, 5, &mut rng).is_err());
    }
}
