//! Clifford+T gate lists: text format, exact unitaries, Clifford
//! conjugators for `R(P)`, and benchmark fixtures.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channel::Unitary;
use crate::decomposition::Decomposition;
use crate::error::{Error, Result};
use crate::pauli::{Pauli, MAX_QUBITS};
use crate::ring::ComplexElt;

/// A gate with 1-based qubit operands.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Gate {
    H(usize),
    T(usize),
    Tdg(usize),
    S(usize),
    Sdg(usize),
    X(usize),
    Y(usize),
    Z(usize),
    Cnot(usize, usize),
    Swap(usize, usize),
}

impl Gate {
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::H(q)
            | Gate::T(q)
            | Gate::Tdg(q)
            | Gate::S(q)
            | Gate::Sdg(q)
            | Gate::X(q)
            | Gate::Y(q)
            | Gate::Z(q) => vec![q],
            Gate::Cnot(a, b) | Gate::Swap(a, b) => vec![a, b],
        }
    }

    pub fn inverse(&self) -> Gate {
        match *self {
            Gate::T(q) => Gate::Tdg(q),
            Gate::Tdg(q) => Gate::T(q),
            Gate::S(q) => Gate::Sdg(q),
            Gate::Sdg(q) => Gate::S(q),
            g => g,
        }
    }

    pub fn is_t(&self) -> bool {
        matches!(self, Gate::T(_) | Gate::Tdg(_))
    }

    pub fn mnemonic(&self) -> &'static str {
        match self {
            Gate::H(_) => "h",
            Gate::T(_) => "t",
            Gate::Tdg(_) => "tdg",
            Gate::S(_) => "s",
            Gate::Sdg(_) => "sdg",
            Gate::X(_) => "x",
            Gate::Y(_) => "y",
            Gate::Z(_) => "z",
            Gate::Cnot(..) => "cnot",
            Gate::Swap(..) => "swap",
        }
    }

    /// Same gate with every operand mapped through `f`.
    pub fn remap(&self, f: impl Fn(usize) -> usize) -> Gate {
        match *self {
            Gate::H(q) => Gate::H(f(q)),
            Gate::T(q) => Gate::T(f(q)),
            Gate::Tdg(q) => Gate::Tdg(f(q)),
            Gate::S(q) => Gate::S(f(q)),
            Gate::Sdg(q) => Gate::Sdg(f(q)),
            Gate::X(q) => Gate::X(f(q)),
            Gate::Y(q) => Gate::Y(f(q)),
            Gate::Z(q) => Gate::Z(f(q)),
            Gate::Cnot(a, b) => Gate::Cnot(f(a), f(b)),
            Gate::Swap(a, b) => Gate::Swap(f(a), f(b)),
        }
    }

    fn single_matrix(&self) -> Option<[[ComplexElt; 2]; 2]> {
        let (o, z, i) = (ComplexElt::ONE, ComplexElt::ZERO, ComplexElt::I);
        let h = ComplexElt::INV_SQRT2;
        Some(match self {
            Gate::H(_) => [[h, h], [h, -h]],
            Gate::T(_) => [[o, z], [z, ComplexElt::OMEGA]],
            Gate::Tdg(_) => [[o, z], [z, ComplexElt::OMEGA.conj()]],
            Gate::S(_) => [[o, z], [z, i]],
            Gate::Sdg(_) => [[o, z], [z, -i]],
            Gate::X(_) => [[z, o], [o, z]],
            Gate::Y(_) => [[z, -i], [i, z]],
            Gate::Z(_) => [[o, z], [z, -o]],
            Gate::Cnot(..) | Gate::Swap(..) => return None,
        })
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let qs = self.qubits();
        write!(f, "{}", self.mnemonic())?;
        for q in qs {
            write!(f, " {q}")?;
        }
        Ok(())
    }
}

/// Gates in chronological order: the first gate acts first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    n: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::Invalid(format!("unsupported qubit count {n}")));
        }
        Ok(Circuit {
            n,
            gates: Vec::new(),
        })
    }

    pub fn from_gates(n: usize, gates: impl IntoIterator<Item = Gate>) -> Result<Self> {
        let mut c = Circuit::new(n)?;
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, g: Gate) -> Result<()> {
        let qs = g.qubits();
        if qs.iter().any(|&q| q == 0 || q > self.n) {
            return Err(Error::Invalid(format!(
                "gate '{g}' has an operand outside 1..={}",
                self.n
            )));
        }
        if qs.len() == 2 && qs[0] == qs[1] {
            return Err(Error::Invalid(format!("gate '{g}' repeats an operand")));
        }
        self.gates.push(g);
        Ok(())
    }

    pub fn extend(&mut self, other: &Circuit) -> Result<()> {
        if other.n != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        self.gates.extend_from_slice(&other.gates);
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn t_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_t()).count()
    }

    pub fn inverse(&self) -> Circuit {
        Circuit {
            n: self.n,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
        }
    }

    /// Places this circuit on `n` qubits, sending qubit `i` to `targets[i-1]`.
    pub fn embed(&self, n: usize, targets: &[usize]) -> Result<Circuit> {
        if targets.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: targets.len(),
            });
        }
        Circuit::from_gates(n, self.gates.iter().map(|g| g.remap(|q| targets[q - 1])))
    }

    pub fn unitary(&self) -> Unitary {
        unitary_of_circuit(self)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("# qubits {}\n", self.n);
        for g in &self.gates {
            s.push_str(&g.to_string());
            s.push('\n');
        }
        s
    }

    /// Parses the line format `"<mnemonic> <q> [<q>]"`. The qubit count is
    /// taken from a `# qubits N` header if present, else from the largest
    /// operand.
    pub fn parse(text: &str) -> Result<Circuit> {
        let mut declared = None;
        let mut gates = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if let Some(comment) = line.strip_prefix('#') {
                let mut it = comment.split_whitespace();
                if it.next() == Some("qubits") {
                    let n = it
                        .next()
                        .and_then(|t| t.parse::<usize>().ok())
                        .ok_or_else(|| {
                            Error::Invalid(format!("line {}: bad qubit header", lineno + 1))
                        })?;
                    declared = Some(n);
                }
                continue;
            }
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let g: Gate = line
                .parse()
                .map_err(|e: Error| Error::Invalid(format!("line {}: {e}", lineno + 1)))?;
            gates.push(g);
        }
        let used = gates.iter().flat_map(|g| g.qubits()).max().unwrap_or(1);
        let n = declared.unwrap_or(used);
        Circuit::from_gates(n, gates)
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl FromStr for Gate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Gate> {
        let toks: Vec<&str> = s.split_whitespace().collect();
        let (name, args) = toks
            .split_first()
            .ok_or_else(|| Error::Invalid("empty gate".into()))?;
        let ops = args
            .iter()
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| Error::Invalid(format!("bad qubit operand '{t}'")))
            })
            .collect::<Result<Vec<_>>>()?;
        let name = name.to_ascii_lowercase();
        let arity = if matches!(name.as_str(), "cnot" | "cx" | "swap") {
            2
        } else {
            1
        };
        if ops.len() != arity {
            return Err(Error::Invalid(format!(
                "'{name}' takes {arity} operand(s), got {}",
                ops.len()
            )));
        }
        Ok(match name.as_str() {
            "h" => Gate::H(ops[0]),
            "t" => Gate::T(ops[0]),
            "tdg" => Gate::Tdg(ops[0]),
            "s" => Gate::S(ops[0]),
            "sdg" => Gate::Sdg(ops[0]),
            "x" => Gate::X(ops[0]),
            "y" => Gate::Y(ops[0]),
            "z" => Gate::Z(ops[0]),
            "cnot" | "cx" => Gate::Cnot(ops[0], ops[1]),
            "swap" => Gate::Swap(ops[0], ops[1]),
            other => return Err(Error::Invalid(format!("unknown gate '{other}'"))),
        })
    }
}

/// Exact product of the gate matrices, later gates on the left.
pub fn unitary_of_circuit(c: &Circuit) -> Unitary {
    let n = c.n();
    let dim = 1usize << n;
    let mut u = Unitary::identity(n);
    let bit = |q: usize| 1usize << (n - q);
    for g in c.gates() {
        match *g {
            Gate::Cnot(ctl, tgt) => {
                let (cb, tb) = (bit(ctl), bit(tgt));
                for x in 0..dim {
                    if x & cb != 0 && x & tb == 0 {
                        swap_rows(&mut u, x, x | tb);
                    }
                }
            }
            Gate::Swap(a, b) => {
                let (ab, bb) = (bit(a), bit(b));
                for x in 0..dim {
                    if x & ab != 0 && x & bb == 0 {
                        swap_rows(&mut u, x, (x & !ab) | bb);
                    }
                }
            }
            _ => {
                let m = g.single_matrix().expect("single-qubit gate");
                let q = g.qubits()[0];
                let qb = bit(q);
                for x0 in 0..dim {
                    if x0 & qb != 0 {
                        continue;
                    }
                    let x1 = x0 | qb;
                    for col in 0..dim {
                        let (v0, v1) = (u.get(x0, col), u.get(x1, col));
                        if v0.is_zero() && v1.is_zero() {
                            continue;
                        }
                        u.set(x0, col, m[0][0] * v0 + m[0][1] * v1);
                        u.set(x1, col, m[1][0] * v0 + m[1][1] * v1);
                    }
                }
            }
        }
    }
    u
}

fn swap_rows(u: &mut Unitary, a: usize, b: usize) {
    for col in 0..u.dim() {
        let (x, y) = (u.get(a, col), u.get(b, col));
        u.set(a, col, y);
        u.set(b, col, x);
    }
}

/// A Clifford circuit `C` with `C Z_q C† = P`.
///
/// First the `Z` on `q` is moved onto a qubit in the support of `P` (a SWAP
/// when `q` is outside it), then fanned out to every support qubit with
/// CNOTs targeting that qubit, and finally each support qubit is rotated
/// from `Z` to its digit (`X` via H, `Y` via H then S).
pub fn clifford_mapping_circuit(p: Pauli, q: usize) -> Result<Circuit> {
    if p.is_identity() {
        return Err(Error::Invalid(
            "identity has no T-conjugating Clifford".into(),
        ));
    }
    let n = p.n();
    if q == 0 || q > n {
        return Err(Error::Invalid(format!("target qubit {q} out of range")));
    }
    let support: Vec<usize> = (1..=n).filter(|&j| p.digit(j) != 0).collect();
    let mut c = Circuit::new(n)?;
    let hub = if support.contains(&q) {
        q
    } else {
        let s = support[0];
        c.push(Gate::Swap(q, s))?;
        s
    };
    for &j in &support {
        if j != hub {
            c.push(Gate::Cnot(j, hub))?;
        }
    }
    for &j in &support {
        match p.digit(j) {
            1 => c.push(Gate::H(j))?,
            2 => {
                c.push(Gate::H(j))?;
                c.push(Gate::S(j))?;
            }
            _ => {}
        }
    }
    Ok(c)
}

/// Circuit for `R(P) = C T_q C†`, using qubit 1 of the support as `q`.
pub fn rp_circuit(p: Pauli) -> Result<Circuit> {
    let q = (1..=p.n())
        .find(|&j| p.digit(j) != 0)
        .ok_or_else(|| Error::Invalid("identity Pauli".into()))?;
    let c = clifford_mapping_circuit(p, q)?;
    let mut out = c.inverse();
    out.push(Gate::T(q))?;
    out.extend(&c)?;
    Ok(out)
}

/// Gate-level circuit for the non-Clifford part `R(P_t)···R(P_1)` of a
/// decomposition, in chronological order (`R(P_1)` first). The terminal
/// Clifford is not synthesized; the full unitary is this fragment applied
/// after `C₀`.
pub fn emit_circuit(d: &Decomposition) -> Result<Circuit> {
    let n = d.clifford.n();
    let mut c = Circuit::new(n)?;
    for p in d.paulis.iter().rev() {
        c.extend(&rp_circuit(*p)?)?;
    }
    Ok(c)
}

pub mod fixtures {
    //! Benchmark circuits.

    use super::*;

    fn build(n: usize, gates: &[Gate]) -> Circuit {
        Circuit::from_gates(n, gates.iter().copied()).expect("fixture is well formed")
    }

    /// `|a,b,c⟩ → |a,b,c ⊕ ab⟩`, 7 T gates.
    pub fn toffoli() -> Circuit {
        use Gate::*;
        build(
            3,
            &[
                H(3),
                T(1),
                T(2),
                T(3),
                Cnot(2, 1),
                Cnot(3, 2),
                Cnot(1, 3),
                Tdg(2),
                Cnot(1, 2),
                Tdg(1),
                Tdg(2),
                T(3),
                Cnot(3, 2),
                Cnot(1, 3),
                Cnot(2, 1),
                H(3),
            ],
        )
    }

    /// Controlled swap of qubits 2 and 3, controlled on qubit 1.
    pub fn fredkin() -> Circuit {
        use Gate::*;
        build(
            3,
            &[
                Cnot(3, 2),
                Cnot(1, 2),
                H(3),
                T(1),
                Tdg(2),
                T(3),
                Cnot(3, 2),
                Cnot(1, 3),
                T(2),
                Cnot(1, 2),
                Tdg(3),
                Tdg(2),
                Cnot(1, 3),
                Cnot(3, 2),
                T(2),
                H(3),
                Cnot(3, 2),
            ],
        )
    }

    /// `|a,b,c⟩ → |a, a⊕b, c⊕ab⟩`.
    pub fn peres() -> Circuit {
        use Gate::*;
        build(
            3,
            &[
                T(1),
                T(2),
                H(3),
                Cnot(3, 2),
                Tdg(2),
                Cnot(1, 3),
                Cnot(1, 2),
                Tdg(3),
                Cnot(1, 3),
                T(2),
                T(3),
                Cnot(3, 2),
                Tdg(2),
                H(3),
            ],
        )
    }

    /// `|a,b,c⟩ → |a,b,c ⊕ (a ∨ b)⟩`.
    pub fn quantum_or() -> Circuit {
        use Gate::*;
        let mut c = build(3, &[X(1), X(2)]);
        c.extend(&toffoli()).expect("same width");
        for g in [X(1), X(2), X(3)] {
            c.push(g).expect("valid");
        }
        c
    }

    /// Toffoli controlled on both controls being 0.
    pub fn negated_toffoli() -> Circuit {
        use Gate::*;
        let mut c = build(3, &[X(1), X(2)]);
        c.extend(&toffoli()).expect("same width");
        for g in [X(1), X(2)] {
            c.push(g).expect("valid");
        }
        c
    }

    /// Reversible 1-bit full adder on 4 qubits, 7 T gates.
    pub fn adder4() -> Circuit {
        use Gate::*;
        let swap = |a: usize, b: usize| [Cnot(a, b), Cnot(b, a), Cnot(a, b)];
        let mut gates = vec![
            Cnot(2, 1),
            H(4),
            Cnot(3, 1),
            Sdg(1),
            Sdg(2),
            Sdg(3),
            Cnot(1, 3),
            Cnot(2, 3),
            Cnot(2, 1),
            Cnot(3, 1),
            H(1),
            H(2),
            Sdg(3),
            H(3),
            Cnot(2, 3),
            Cnot(1, 2),
            Cnot(4, 1),
            H(1),
            H(2),
            H(3),
            Cnot(1, 3),
            Cnot(4, 3),
            Cnot(4, 2),
            Cnot(4, 1),
            Cnot(3, 1),
            Sdg(4),
            T(2),
            T(3),
            Tdg(4),
            Cnot(2, 4),
            Cnot(3, 4),
            Cnot(3, 2),
            Cnot(4, 3),
            T(2),
            T(3),
            T(4),
            Cnot(2, 4),
            Cnot(3, 2),
        ];
        gates.extend(swap(1, 2));
        gates.push(H(4));
        gates.push(T(1));
        gates.push(Cnot(1, 2));
        gates.push(Cnot(2, 1));
        gates.extend(swap(2, 3));
        build(4, &gates)
    }

    /// `(TOF ⊗ I)(I ⊗ TOF)`.
    pub fn u1() -> Circuit {
        let mut c = toffoli().embed(4, &[2, 3, 4]).expect("embed");
        c.extend(&toffoli().embed(4, &[1, 2, 3]).expect("embed"))
            .expect("same width");
        c
    }

    /// `(TOF ⊗ I)(I ⊗ TOF)(TOF ⊗ I)`.
    pub fn u2() -> Circuit {
        let mut c = toffoli().embed(4, &[1, 2, 3]).expect("embed");
        c.extend(&toffoli().embed(4, &[2, 3, 4]).expect("embed"))
            .expect("same width");
        c.extend(&toffoli().embed(4, &[1, 2, 3]).expect("embed"))
            .expect("same width");
        c
    }

    /// A Clifford-only 3-qubit circuit.
    pub fn clifford3() -> Circuit {
        use Gate::*;
        build(3, &[H(1), S(2), Cnot(1, 3), H(3), Cnot(3, 2), Sdg(1), X(2)])
    }

    /// Names accepted by [`by_name`].
    pub const NAMES: &[&str] = &[
        "toffoli",
        "fredkin",
        "peres",
        "quantum_or",
        "negated_toffoli",
        "adder4",
        "u1",
        "u2",
        "clifford",
    ];

    pub fn by_name(name: &str) -> Result<Circuit> {
        Ok(match name {
            "toffoli" => toffoli(),
            "fredkin" => fredkin(),
            "peres" => peres(),
            "quantum_or" | "or" => quantum_or(),
            "negated_toffoli" => negated_toffoli(),
            "adder4" | "adder" => adder4(),
            "u1" => u1(),
            "u2" => u2(),
            "clifford" => clifford3(),
            other => {
                return Err(Error::UnknownName {
                    kind: "fixture",
                    name: other.to_string(),
                })
            }
        })
    }

    /// Random Clifford circuit of `len` gates drawn from {H, S, CNOT}.
    pub fn random_clifford(n: usize, len: usize, seed: u64) -> Result<Circuit> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut c = Circuit::new(n)?;
        for _ in 0..len {
            let q = rng.gen_range(1..=n);
            let g = match rng.gen_range(0..if n >= 2 { 3 } else { 2 }) {
                0 => Gate::H(q),
                1 => Gate::S(q),
                _ => {
                    let mut t = rng.gen_range(1..n);
                    if t >= q {
                        t += 1;
                    }
                    Gate::Cnot(q, t)
                }
            };
            c.push(g)?;
        }
        Ok(c)
    }

    /// Random Clifford+T circuit with exactly `t_gates` T gates, each
    /// preceded by 1–3 uniformly drawn Clifford gates from {H, S, CNOT}, plus
    /// a trailing Clifford block.
    pub fn random_circuit(n: usize, t_gates: usize, seed: u64) -> Result<Circuit> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut c = Circuit::new(n)?;
        let clifford_block = |rng: &mut ChaCha8Rng, c: &mut Circuit| -> Result<()> {
            for _ in 0..rng.gen_range(1..=3) {
                let kinds = if n >= 2 { 3 } else { 2 };
                let q = rng.gen_range(1..=n);
                let g = match rng.gen_range(0..kinds) {
                    0 => Gate::H(q),
                    1 => Gate::S(q),
                    _ => {
                        let mut t = rng.gen_range(1..n);
                        if t >= q {
                            t += 1;
                        }
                        Gate::Cnot(q, t)
                    }
                };
                c.push(g)?;
            }
            Ok(())
        };
        for _ in 0..t_gates {
            clifford_block(&mut rng, &mut c)?;
            let q = rng.gen_range(1..=n);
            c.push(Gate::T(q))?;
        }
        clifford_block(&mut rng, &mut c)?;
        Ok(c)
    }
}
