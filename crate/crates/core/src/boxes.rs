//! Dense k-party conditional probability distributions ("boxes").
//!
//! A box with `k` parties, input alphabet `X` and output alphabet `A` stores
//! `P[a_1..a_k | x_1..x_k]` in a flat array of length `(|X|·|A|)^k`. The flat
//! index is `x_index · |A|^k + a_index`, where both indices are base-`|X|`
//! (resp. base-`|A|`) numbers with party 0 as the most significant digit.
//!
//! Parties are numbered from 0 in the library API.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default tolerance for validity checks and box equality.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Largest party count accepted by [`CondBox::symmetrize`].
pub const MAX_SYMMETRIZE_PARTIES: usize = 8;

fn pow(base: usize, exp: usize) -> usize {
    base.pow(exp as u32)
}

/// Writes the base-`base` digits of `value` into `out`, most significant first.
pub(crate) fn decode_digits(mut value: usize, base: usize, out: &mut [usize]) {
    for d in out.iter_mut().rev() {
        *d = value % base;
        value /= base;
    }
}

pub(crate) fn encode_digits(digits: &[usize], base: usize) -> usize {
    digits.iter().fold(0, |acc, &d| acc * base + d)
}

/// A k-party conditional probability distribution `P[A^k | X^k]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBox")]
pub struct CondBox {
    parties: usize,
    inputs: usize,
    outputs: usize,
    probs: Vec<f64>,
}

#[derive(Deserialize)]
struct RawBox {
    parties: usize,
    inputs: usize,
    outputs: usize,
    probs: Vec<f64>,
}

impl TryFrom<RawBox> for CondBox {
    type Error = Error;

    fn try_from(raw: RawBox) -> Result<Self> {
        CondBox::new(raw.parties, raw.inputs, raw.outputs, raw.probs)
    }
}

/// Maximal violations found by [`CondBox::validate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValidationReport {
    pub normalization_violation: f64,
    pub negativity_violation: f64,
    pub signalling_violation: f64,
}

impl ValidationReport {
    /// Normalized and nonnegative within `tol`.
    pub fn is_valid(&self, tol: f64) -> bool {
        self.normalization_violation <= tol && self.negativity_violation <= tol
    }

    pub fn is_valid_no_signalling(&self, tol: f64) -> bool {
        self.is_valid(tol) && self.signalling_violation <= tol
    }
}

/// A bijection on party labels `0..k`; `mapping[i]` is the image of `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    mapping: Vec<usize>,
}

impl Permutation {
    pub fn new(mapping: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; mapping.len()];
        for &m in &mapping {
            if m >= mapping.len() || seen[m] {
                return Err(Error::Precondition(format!(
                    "{mapping:?} is not a permutation"
                )));
            }
            seen[m] = true;
        }
        Ok(Self { mapping })
    }

    pub fn identity(k: usize) -> Self {
        Self {
            mapping: (0..k).collect(),
        }
    }

    pub fn transposition(k: usize, i: usize, j: usize) -> Result<Self> {
        if i >= k || j >= k {
            return Err(Error::Precondition(format!(
                "transposition ({i} {j}) out of range for {k} parties"
            )));
        }
        let mut mapping: Vec<usize> = (0..k).collect();
        mapping.swap(i, j);
        Ok(Self { mapping })
    }

    pub fn len(&self) -> usize {
        self.mapping.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mapping.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.mapping[i]
    }

    pub fn mapping(&self) -> &[usize] {
        &self.mapping
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.mapping.len()];
        for (i, &m) in self.mapping.iter().enumerate() {
            inv[m] = i;
        }
        Self { mapping: inv }
    }

    /// Left-to-right product `self · next`: apply `self` first, then `next`.
    ///
    /// With this convention `permute(permute(B, σ), π) == permute(B, π.then(σ))`.
    pub fn then(&self, next: &Permutation) -> Self {
        Self {
            mapping: self.mapping.iter().map(|&i| next.mapping[i]).collect(),
        }
    }
}

/// One measured party in a sequential transcript.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Measurement {
    pub party: usize,
    pub input: usize,
    pub output: usize,
}

impl CondBox {
    pub fn new(parties: usize, inputs: usize, outputs: usize, probs: Vec<f64>) -> Result<Self> {
        if parties == 0 || inputs == 0 || outputs == 0 {
            return Err(Error::Dimension(format!(
                "parties, inputs and outputs must be positive (got {parties}, {inputs}, {outputs})"
            )));
        }
        let expected = (inputs * outputs)
            .checked_pow(parties as u32)
            .ok_or_else(|| Error::Resource("box size overflows usize".into()))?;
        if probs.len() != expected {
            return Err(Error::Dimension(format!(
                "expected {expected} probabilities for ({parties}, {inputs}, {outputs}), got {}",
                probs.len()
            )));
        }
        Ok(Self {
            parties,
            inputs,
            outputs,
            probs,
        })
    }

    /// Builds a box by evaluating `f(x^k, a^k)` at every entry.
    pub fn from_fn(
        parties: usize,
        inputs: usize,
        outputs: usize,
        mut f: impl FnMut(&[usize], &[usize]) -> f64,
    ) -> Result<Self> {
        let num_x = pow(inputs, parties);
        let num_a = pow(outputs, parties);
        let mut probs = Vec::with_capacity(num_x * num_a);
        let mut xs = vec![0; parties];
        let mut as_ = vec![0; parties];
        for xi in 0..num_x {
            decode_digits(xi, inputs, &mut xs);
            for ai in 0..num_a {
                decode_digits(ai, outputs, &mut as_);
                probs.push(f(&xs, &as_));
            }
        }
        Self::new(parties, inputs, outputs, probs)
    }

    /// The box with uniform output distribution for every input.
    pub fn uniform(parties: usize, inputs: usize, outputs: usize) -> Result<Self> {
        let p = 1.0 / pow(outputs, parties) as f64;
        Self::from_fn(parties, inputs, outputs, |_, _| p)
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn into_probs(self) -> Vec<f64> {
        self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Number of input tuples `|X|^k`.
    pub fn num_input_tuples(&self) -> usize {
        pow(self.inputs, self.parties)
    }

    /// Number of output tuples `|A|^k`.
    pub fn num_output_tuples(&self) -> usize {
        pow(self.outputs, self.parties)
    }

    pub fn same_shape(&self, other: &CondBox) -> bool {
        self.parties == other.parties && self.inputs == other.inputs && self.outputs == other.outputs
    }

    pub(crate) fn ensure_same_shape(&self, other: &CondBox) -> Result<()> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(Error::Dimension(format!(
                "box shapes differ: ({}, {}, {}) vs ({}, {}, {})",
                self.parties, self.inputs, self.outputs, other.parties, other.inputs, other.outputs
            )))
        }
    }

    pub fn index(&self, xs: &[usize], as_: &[usize]) -> usize {
        encode_digits(xs, self.inputs) * self.num_output_tuples() + encode_digits(as_, self.outputs)
    }

    /// `P[a^k | x^k]`.
    pub fn prob(&self, xs: &[usize], as_: &[usize]) -> f64 {
        self.probs[self.index(xs, as_)]
    }

    /// The output distribution for input tuple number `x_index`.
    pub fn row(&self, x_index: usize) -> &[f64] {
        let n = self.num_output_tuples();
        &self.probs[x_index * n..(x_index + 1) * n]
    }

    /// Largest absolute entrywise difference. Panics on shape mismatch.
    pub fn max_abs_diff(&self, other: &CondBox) -> f64 {
        assert!(self.same_shape(other), "box shapes differ");
        self.probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &CondBox, tol: f64) -> bool {
        self.same_shape(other) && self.max_abs_diff(other) <= tol
    }

    pub fn validate(&self) -> ValidationReport {
        let mut normalization_violation: f64 = 0.0;
        let mut negativity_violation: f64 = 0.0;
        for xi in 0..self.num_input_tuples() {
            let row = self.row(xi);
            let sum: f64 = row.iter().sum();
            normalization_violation = normalization_violation.max((sum - 1.0).abs());
            for &p in row {
                negativity_violation = negativity_violation.max(-p);
            }
        }
        ValidationReport {
            normalization_violation,
            negativity_violation,
            signalling_violation: self.signalling_violation(),
        }
    }

    fn ensure_valid(&self, tol: f64) -> Result<()> {
        let report = self.validate();
        if report.is_valid(tol) {
            Ok(())
        } else {
            Err(Error::InvalidBox(format!(
                "normalization violation {:e}, negativity violation {:e}",
                report.normalization_violation, report.negativity_violation
            )))
        }
    }

    pub(crate) fn ensure_no_signalling(&self, tol: f64) -> Result<()> {
        self.ensure_valid(tol)?;
        let violation = self.signalling_violation();
        if violation > tol {
            return Err(Error::Signalling { violation });
        }
        Ok(())
    }

    /// Largest deviation over the per-party no-signalling conditions: for each
    /// party `i` and each `(a_{-i}, x_{-i})`, the spread over `x_i` of
    /// `Σ_{a_i} P[a^k | x^k]`.
    pub fn signalling_violation(&self) -> f64 {
        let k = self.parties;
        let (nx, na) = (self.inputs, self.outputs);
        if nx == 1 {
            return 0.0;
        }
        let num_x = self.num_input_tuples();
        let num_a = self.num_output_tuples();
        let mut worst: f64 = 0.0;
        let mut xs = vec![0; k];
        let mut as_ = vec![0; k];
        for party in 0..k {
            // marg[x_index][a_index with party's digit zeroed]
            let mut marg = vec![0.0; num_x * num_a];
            for xi in 0..num_x {
                decode_digits(xi, nx, &mut xs);
                for ai in 0..num_a {
                    decode_digits(ai, na, &mut as_);
                    let a_rest = ai - as_[party] * pow(na, k - 1 - party);
                    marg[xi * num_a + a_rest] += self.probs[xi * num_a + ai];
                }
            }
            let x_stride = pow(nx, k - 1 - party);
            for xi in 0..num_x {
                decode_digits(xi, nx, &mut xs);
                if xs[party] != 0 {
                    continue;
                }
                for ai in 0..num_a {
                    decode_digits(ai, na, &mut as_);
                    if as_[party] != 0 {
                        continue;
                    }
                    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
                    for xv in 0..nx {
                        let v = marg[(xi + xv * x_stride) * num_a + ai];
                        lo = lo.min(v);
                        hi = hi.max(v);
                    }
                    worst = worst.max(hi - lo);
                }
            }
        }
        worst
    }

    pub fn is_no_signalling(&self, tol: f64) -> (bool, f64) {
        let v = self.signalling_violation();
        (v <= tol, v)
    }

    /// Marginal on the ordered party list `subset`, together with the residual
    /// dependence on the traced-out inputs (zero for a no-signalling box).
    ///
    /// The traced-out parties' inputs are fixed to 0.
    pub fn marginal_with_residual(&self, subset: &[usize]) -> Result<(CondBox, f64)> {
        let k = self.parties;
        let mut seen = vec![false; k];
        for &p in subset {
            if p >= k || seen[p] {
                return Err(Error::Precondition(format!(
                    "invalid party subset {subset:?} for a {k}-party box"
                )));
            }
            seen[p] = true;
        }
        if subset.is_empty() {
            return Err(Error::Precondition("empty party subset".into()));
        }
        let rest: Vec<usize> = (0..k).filter(|p| !seen[*p]).collect();
        let (nx, na) = (self.inputs, self.outputs);
        let m = subset.len();
        let sub_x = pow(nx, m);
        let sub_a = pow(na, m);
        let rest_x = pow(nx, rest.len());
        // sums[rest_x_index][sub_x_index * sub_a + sub_a_index]
        let mut sums = vec![0.0; rest_x * sub_x * sub_a];
        let mut xs = vec![0; k];
        let mut as_ = vec![0; k];
        let num_a = self.num_output_tuples();
        for xi in 0..self.num_input_tuples() {
            decode_digits(xi, nx, &mut xs);
            let xs_sub = subset.iter().fold(0, |acc, &p| acc * nx + xs[p]);
            let xs_rest = rest.iter().fold(0, |acc, &p| acc * nx + xs[p]);
            for ai in 0..num_a {
                decode_digits(ai, na, &mut as_);
                let as_sub = subset.iter().fold(0, |acc, &p| acc * na + as_[p]);
                sums[xs_rest * sub_x * sub_a + xs_sub * sub_a + as_sub] += self.probs[xi * num_a + ai];
            }
        }
        let block = sub_x * sub_a;
        let probs = sums[..block].to_vec();
        let mut residual: f64 = 0.0;
        for r in 1..rest_x {
            for (i, base) in probs.iter().enumerate() {
                residual = residual.max((sums[r * block + i] - base).abs());
            }
        }
        Ok((CondBox::new(m, nx, na, probs)?, residual))
    }

    /// Marginal on `subset`; fails if the result depends on the traced-out
    /// inputs by more than `tol`.
    pub fn marginal(&self, subset: &[usize], tol: f64) -> Result<CondBox> {
        let (b, residual) = self.marginal_with_residual(subset)?;
        if residual > tol {
            return Err(Error::Signalling {
                violation: residual,
            });
        }
        Ok(b)
    }

    /// `(π P)[a_1..a_k | x_1..x_k] = P[a_{π⁻¹(1)}..a_{π⁻¹(k)} | x_{π⁻¹(1)}..x_{π⁻¹(k)}]`.
    pub fn permute(&self, pi: &Permutation) -> Result<CondBox> {
        let k = self.parties;
        if pi.len() != k {
            return Err(Error::Dimension(format!(
                "permutation on {} labels applied to a {k}-party box",
                pi.len()
            )));
        }
        let inv = pi.inverse();
        let (nx, na) = (self.inputs, self.outputs);
        let mut xs = vec![0; k];
        let mut as_ = vec![0; k];
        let mut old_xs = vec![0; k];
        let mut old_as = vec![0; k];
        let num_a = self.num_output_tuples();
        let mut probs = vec![0.0; self.probs.len()];
        for xi in 0..self.num_input_tuples() {
            decode_digits(xi, nx, &mut xs);
            for j in 0..k {
                old_xs[j] = xs[inv.apply(j)];
            }
            let old_xi = encode_digits(&old_xs, nx);
            for ai in 0..num_a {
                decode_digits(ai, na, &mut as_);
                for j in 0..k {
                    old_as[j] = as_[inv.apply(j)];
                }
                probs[xi * num_a + ai] = self.probs[old_xi * num_a + encode_digits(&old_as, na)];
            }
        }
        CondBox::new(k, nx, na, probs)
    }

    /// Average over all `k!` party permutations.
    ///
    /// Uses the coset factorization `S_k = S_{k-1}·{(i k)}`, so the cost is
    /// `O(k²·len)` rather than `O(k!·len)`.
    pub fn symmetrize(&self) -> Result<CondBox> {
        let k = self.parties;
        if k > MAX_SYMMETRIZE_PARTIES {
            return Err(Error::Resource(format!(
                "symmetrize supports at most {MAX_SYMMETRIZE_PARTIES} parties, got {k}"
            )));
        }
        let mut current = self.clone();
        for j in 1..k {
            let mut acc = current.probs.clone();
            for i in 0..j {
                let swapped = current.permute(&Permutation::transposition(k, i, j)?)?;
                for (a, s) in acc.iter_mut().zip(&swapped.probs) {
                    *a += s;
                }
            }
            let scale = 1.0 / (j + 1) as f64;
            acc.iter_mut().for_each(|a| *a *= scale);
            current.probs = acc;
        }
        Ok(current)
    }

    /// Largest deviation under any transposition of two parties.
    pub fn symmetry_violation(&self) -> f64 {
        let k = self.parties;
        let mut worst: f64 = 0.0;
        for i in 0..k {
            for j in i + 1..k {
                let t = Permutation::transposition(k, i, j).expect("in range");
                let swapped = self.permute(&t).expect("matching size");
                worst = worst.max(self.max_abs_diff(&swapped));
            }
        }
        worst
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.symmetry_violation() <= tol
    }

    /// Tensor product of boxes sharing the same input and output alphabets.
    pub fn product(factors: &[CondBox]) -> Result<CondBox> {
        let first = factors
            .first()
            .ok_or_else(|| Error::Precondition("product of zero boxes".into()))?;
        let (nx, na) = (first.inputs, first.outputs);
        if factors.iter().any(|f| f.inputs != nx || f.outputs != na) {
            return Err(Error::Dimension(
                "product factors must share input and output alphabets".into(),
            ));
        }
        let mut acc = first.clone();
        for f in &factors[1..] {
            acc = acc.tensor(f);
        }
        Ok(acc)
    }

    fn tensor(&self, other: &CondBox) -> CondBox {
        let (la, lb) = (self.num_output_tuples(), other.num_output_tuples());
        let (xa, xb) = (self.num_input_tuples(), other.num_input_tuples());
        let mut probs = Vec::with_capacity(self.probs.len() * other.probs.len());
        for x1 in 0..xa {
            for x2 in 0..xb {
                for a1 in 0..la {
                    let p = self.probs[x1 * la + a1];
                    for a2 in 0..lb {
                        probs.push(p * other.probs[x2 * lb + a2]);
                    }
                }
            }
        }
        CondBox {
            parties: self.parties + other.parties,
            inputs: self.inputs,
            outputs: self.outputs,
            probs,
        }
    }

    /// `b^{⊗n}`.
    pub fn power(&self, n: usize) -> Result<CondBox> {
        if n == 0 {
            return Err(Error::Precondition("tensor power 0".into()));
        }
        CondBox::product(&vec![self.clone(); n])
    }

    /// Convex combination `Σ w_i B_i`.
    pub fn mix(weighted: &[(f64, CondBox)], tol: f64) -> Result<CondBox> {
        let (_, first) = weighted
            .first()
            .ok_or_else(|| Error::Precondition("mixture of zero boxes".into()))?;
        let mut total = 0.0;
        let mut probs = vec![0.0; first.probs.len()];
        for (w, b) in weighted {
            first.ensure_same_shape(b)?;
            if *w < -tol || !w.is_finite() {
                return Err(Error::Precondition(format!("negative mixture weight {w}")));
            }
            total += w;
            for (p, q) in probs.iter_mut().zip(&b.probs) {
                *p += w * q;
            }
        }
        if (total - 1.0).abs() > tol {
            return Err(Error::Precondition(format!(
                "mixture weights sum to {total}, not 1"
            )));
        }
        CondBox::new(first.parties, first.inputs, first.outputs, probs)
    }

    /// The one-party box `P[a|x] = [a = table[x]]`.
    pub fn deterministic(table: &[usize], outputs: usize) -> Result<CondBox> {
        if let Some(&bad) = table.iter().find(|&&v| v >= outputs) {
            return Err(Error::Precondition(format!(
                "deterministic table value {bad} outside output alphabet of size {outputs}"
            )));
        }
        CondBox::from_fn(1, table.len(), outputs, |x, a| {
            if a[0] == table[x[0]] {
                1.0
            } else {
                0.0
            }
        })
    }

    /// All `|A|^|X|` deterministic one-party boxes, in lexicographic order of
    /// their tables.
    pub fn all_deterministic(inputs: usize, outputs: usize) -> Result<Vec<CondBox>> {
        let count = outputs
            .checked_pow(inputs as u32)
            .ok_or_else(|| Error::Resource("too many deterministic boxes".into()))?;
        let mut table = vec![0; inputs];
        (0..count)
            .map(|t| {
                decode_digits(t, outputs, &mut table);
                CondBox::deterministic(&table, outputs)
            })
            .collect()
    }

    /// Conditional distribution of `next_party`'s output when it is given
    /// `next_input`, given the outputs already observed in `measured`.
    ///
    /// Unmeasured parties' inputs are fixed to 0. A transcript of probability
    /// zero yields the uniform distribution.
    pub fn sequential_condition(
        &self,
        measured: &[Measurement],
        next_party: usize,
        next_input: usize,
    ) -> Result<Vec<f64>> {
        let k = self.parties;
        let mut used = vec![false; k];
        for m in measured.iter().map(|m| m.party).chain(std::iter::once(next_party)) {
            if m >= k || used[m] {
                return Err(Error::Precondition(format!(
                    "party {m} is out of range or measured twice"
                )));
            }
            used[m] = true;
        }
        if next_input >= self.inputs || measured.iter().any(|m| m.input >= self.inputs) {
            return Err(Error::Precondition("input outside alphabet".into()));
        }
        if measured.iter().any(|m| m.output >= self.outputs) {
            return Err(Error::Precondition("output outside alphabet".into()));
        }
        let mut xs = vec![0; k];
        for m in measured {
            xs[m.party] = m.input;
        }
        xs[next_party] = next_input;
        let row = self.row(encode_digits(&xs, self.inputs));
        let mut dist = vec![0.0; self.outputs];
        let mut as_ = vec![0; k];
        for (ai, p) in row.iter().enumerate() {
            decode_digits(ai, self.outputs, &mut as_);
            if measured.iter().all(|m| as_[m.party] == m.output) {
                dist[as_[next_party]] += p;
            }
        }
        let total: f64 = dist.iter().sum();
        if total <= 0.0 {
            return Ok(vec![1.0 / self.outputs as f64; self.outputs]);
        }
        dist.iter_mut().for_each(|d| *d /= total);
        Ok(dist)
    }
}
