//! Dense bivariate and univariate polynomials, Sylvester resultants and
//! division-free ratio tests.

use std::fmt;

use thiserror::Error;

use crate::scalar::Scalar;

/// Variable name. Polynomials carry an ordered pair of these.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Var(pub &'static str);

impl Var {
    pub const X1: Var = Var("x1");
    pub const X2: Var = Var("x2");
    pub const X3: Var = Var("x3");
    pub const X4: Var = Var("x4");
    pub const Y1: Var = Var("y1");
    pub const Y2: Var = Var("y2");
    pub const Y3: Var = Var("y3");
    pub const Y4: Var = Var("y4");

    pub fn x(i: usize) -> Var {
        [Var::X1, Var::X2, Var::X3, Var::X4][(i + 3) % 4]
    }
    pub fn y(i: usize) -> Var {
        [Var::Y1, Var::Y2, Var::Y3, Var::Y4][(i + 3) % 4]
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.0)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolyError {
    #[error("nothing to eliminate: both inputs are constant in {0}")]
    NothingToEliminate(Var),
    #[error("variable {0} does not occur in the operand's variable pair")]
    MissingVariable(Var),
    #[error("resultant would be univariate: both remaining variables are {0}")]
    SameVariable(Var),
    #[error("variable pairs differ: ({0},{1}) vs ({2},{3})")]
    VarMismatch(Var, Var, Var, Var),
    #[error("division by the zero polynomial")]
    DivisionByZero,
}

/// Polynomial in an ordered variable pair `(u, v)`; `c[i][j]` is the
/// coefficient of `u^i v^j`. The zero polynomial has an empty grid.
#[derive(Clone, PartialEq)]
pub struct BiPoly<S> {
    vars: (Var, Var),
    c: Vec<Vec<S>>,
}

impl<S: Scalar> BiPoly<S> {
    pub fn zero(vars: (Var, Var)) -> Self {
        BiPoly {
            vars,
            c: Vec::new(),
        }
    }

    pub fn constant(vars: (Var, Var), k: S) -> Self {
        BiPoly::from_grid(vars, vec![vec![k]])
    }

    /// Build from a possibly ragged grid; trailing zero rows and columns are trimmed.
    pub fn from_grid(vars: (Var, Var), grid: Vec<Vec<S>>) -> Self {
        let cols = grid.iter().map(Vec::len).max().unwrap_or(0);
        let c = grid
            .into_iter()
            .map(|mut row| {
                row.resize(cols, S::zero());
                row
            })
            .collect();
        let mut p = BiPoly { vars, c };
        p.normalize();
        p
    }

    /// Build from `(i, j, coeff)` triples.
    pub fn from_terms(vars: (Var, Var), terms: &[(usize, usize, S)]) -> Self {
        let du = terms.iter().map(|t| t.0).max().map_or(0, |d| d + 1);
        let dv = terms.iter().map(|t| t.1).max().map_or(0, |d| d + 1);
        let mut grid = vec![vec![S::zero(); dv]; du];
        for (i, j, k) in terms {
            grid[*i][*j] = grid[*i][*j].clone() + k.clone();
        }
        BiPoly::from_grid(vars, grid)
    }

    /// The monomial `u` or `v` (whichever equals `x`).
    pub fn var(vars: (Var, Var), x: Var) -> Self {
        if x == vars.0 {
            BiPoly::from_terms(vars, &[(1, 0, S::one())])
        } else {
            BiPoly::from_terms(vars, &[(0, 1, S::one())])
        }
    }

    fn normalize(&mut self) {
        while self
            .c
            .last()
            .is_some_and(|r| r.iter().all(|x| x == &S::zero()))
        {
            self.c.pop();
        }
        let cols = self
            .c
            .iter()
            .map(|r| r.iter().rposition(|x| x != &S::zero()).map_or(0, |p| p + 1))
            .max()
            .unwrap_or(0);
        for r in &mut self.c {
            r.truncate(cols);
        }
        if cols == 0 {
            self.c.clear();
        }
    }

    pub fn vars(&self) -> (Var, Var) {
        self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree in the first variable (`None` for the zero polynomial).
    pub fn deg_u(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    /// Degree in the second variable (`None` for the zero polynomial).
    pub fn deg_v(&self) -> Option<usize> {
        self.c.first().map(|r| r.len() - 1)
    }

    pub fn degree_in(&self, x: Var) -> Option<usize> {
        if x == self.vars.0 {
            self.deg_u()
        } else if x == self.vars.1 {
            self.deg_v()
        } else if self.is_zero() {
            None
        } else {
            Some(0)
        }
    }

    pub fn coeff(&self, i: usize, j: usize) -> S {
        self.c
            .get(i)
            .and_then(|r| r.get(j))
            .cloned()
            .unwrap_or_else(S::zero)
    }

    /// Nonzero terms `(i, j, coeff)` in row-major order.
    pub fn terms(&self) -> Vec<(usize, usize, S)> {
        let mut out = Vec::new();
        for (i, r) in self.c.iter().enumerate() {
            for (j, x) in r.iter().enumerate() {
                if x != &S::zero() {
                    out.push((i, j, x.clone()));
                }
            }
        }
        out
    }

    pub fn grid(&self) -> &[Vec<S>] {
        &self.c
    }

    /// Max-abs coefficient magnitude.
    pub fn norm(&self) -> f64 {
        self.c.iter().flatten().map(Scalar::mag).fold(0.0, f64::max)
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> BiPoly<T> {
        BiPoly::from_grid(
            self.vars,
            self.c.iter().map(|r| r.iter().map(&f).collect()).collect(),
        )
    }

    pub fn to_f64(&self) -> BiPoly<f64> {
        self.map(Scalar::to_f64)
    }

    /// Rename the variable pair without touching coefficients.
    pub fn rename(&self, vars: (Var, Var)) -> Self {
        BiPoly {
            vars,
            c: self.c.clone(),
        }
    }

    /// Swap the roles of the two variables.
    pub fn transpose(&self) -> Self {
        let du = self.c.len();
        let dv = self.c.first().map_or(0, Vec::len);
        let mut g = vec![vec![S::zero(); du]; dv];
        for (i, r) in self.c.iter().enumerate() {
            for (j, x) in r.iter().enumerate() {
                g[j][i] = x.clone();
            }
        }
        BiPoly::from_grid((self.vars.1, self.vars.0), g)
    }

    /// Re-express in the requested variable order (transposing if needed).
    pub fn ordered(&self, vars: (Var, Var)) -> Result<Self, PolyError> {
        if self.vars == vars {
            Ok(self.clone())
        } else if (self.vars.1, self.vars.0) == vars {
            Ok(self.transpose())
        } else {
            Err(PolyError::VarMismatch(
                self.vars.0,
                self.vars.1,
                vars.0,
                vars.1,
            ))
        }
    }

    pub fn scale(&self, k: &S) -> Self {
        self.map(|x| x.clone() * k.clone())
    }

    pub fn neg(&self) -> Self {
        self.map(|x| -x.clone())
    }

    pub fn add(&self, other: &Self) -> Self {
        let other = self.align(other);
        let du = self.c.len().max(other.c.len());
        let dv = self
            .c
            .first()
            .map_or(0, Vec::len)
            .max(other.c.first().map_or(0, Vec::len));
        let mut g = vec![vec![S::zero(); dv]; du];
        for p in [&self.c, &other.c] {
            for (i, r) in p.iter().enumerate() {
                for (j, x) in r.iter().enumerate() {
                    g[i][j] = g[i][j].clone() + x.clone();
                }
            }
        }
        BiPoly::from_grid(self.vars, g)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let other = self.align(other);
        if self.is_zero() || other.is_zero() {
            return BiPoly::zero(self.vars);
        }
        let du = self.c.len() + other.c.len() - 1;
        let dv = self.c[0].len() + other.c[0].len() - 1;
        let mut g = vec![vec![S::zero(); dv]; du];
        for (i, r) in self.c.iter().enumerate() {
            for (j, x) in r.iter().enumerate() {
                if x == &S::zero() {
                    continue;
                }
                for (k, s) in other.c.iter().enumerate() {
                    for (l, y) in s.iter().enumerate() {
                        g[i + k][j + l] = g[i + k][j + l].clone() + x.clone() * y.clone();
                    }
                }
            }
        }
        BiPoly::from_grid(self.vars, g)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut r = BiPoly::constant(self.vars, S::one());
        for _ in 0..k {
            r = r.mul(self);
        }
        r
    }

    /// Accept an operand written in the same pair (either order) or a constant.
    fn align(&self, other: &Self) -> Self {
        if other.vars == self.vars {
            other.clone()
        } else if (other.vars.1, other.vars.0) == self.vars {
            other.transpose()
        } else if other.deg_u().unwrap_or(0) == 0 && other.deg_v().unwrap_or(0) == 0 {
            other.rename(self.vars)
        } else {
            panic!(
                "variable pairs ({}, {}) and ({}, {}) are incompatible",
                self.vars.0, self.vars.1, other.vars.0, other.vars.1
            )
        }
    }

    pub fn eval(&self, u: &S, v: &S) -> S {
        let mut acc = S::zero();
        for r in self.c.iter().rev() {
            let mut row = S::zero();
            for x in r.iter().rev() {
                row = row * v.clone() + x.clone();
            }
            acc = acc * u.clone() + row;
        }
        acc
    }

    /// Coefficients as a polynomial in `x`, each a univariate polynomial in
    /// the other variable (index = power of `x`).
    pub fn coeffs_in(&self, x: Var) -> Result<Vec<UniPoly<S>>, PolyError> {
        let other = self.other_var(x)?;
        let t = if x == self.vars.0 {
            self.clone()
        } else {
            self.transpose()
        };
        Ok(t.c.iter().map(|r| UniPoly::new(other, r.clone())).collect())
    }

    fn other_var(&self, x: Var) -> Result<Var, PolyError> {
        if x == self.vars.0 {
            Ok(self.vars.1)
        } else if x == self.vars.1 {
            Ok(self.vars.0)
        } else {
            Err(PolyError::MissingVariable(x))
        }
    }

    /// Total-degree parity class of the nonzero monomials.
    pub fn parity(&self) -> Parity {
        let mut odd = false;
        let mut even = false;
        for (i, j, _) in self.terms() {
            if (i + j) % 2 == 0 {
                even = true;
            } else {
                odd = true;
            }
        }
        match (odd, even) {
            (true, false) => Parity::OddOnly,
            (false, true) => Parity::EvenOnly,
            _ => Parity::Mixed,
        }
    }

    /// Zero coefficients whose magnitude is negligible against the max.
    pub fn cleaned(&self) -> Self {
        if S::EXACT {
            return self.clone();
        }
        let n = self.norm();
        self.map(|x| {
            if x.is_negligible(n) {
                S::zero()
            } else {
                x.clone()
            }
        })
    }

    /// Divide by the coefficient of largest magnitude (first in row-major order on ties).
    pub fn monic_by_max(&self) -> Self {
        let n = self.norm();
        match self.c.iter().flatten().find(|x| x.mag() == n) {
            Some(lead) if !self.is_zero() => {
                let inv = S::one() / lead.clone();
                self.scale(&inv)
            }
            _ => self.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    OddOnly,
    EvenOnly,
    Mixed,
}

impl<S: Scalar> fmt::Debug for BiPoly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl<S: Scalar> fmt::Display for BiPoly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.terms();
        if terms.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, j, k) in terms.into_iter().rev() {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(f, "({k})")?;
            for (d, x) in [(i, self.vars.0), (j, self.vars.1)] {
                match d {
                    0 => {}
                    1 => write!(f, "*{x}")?,
                    _ => write!(f, "*{x}^{d}")?,
                }
            }
        }
        Ok(())
    }
}

/// Univariate polynomial, ascending coefficients.
#[derive(Clone, PartialEq, Debug)]
pub struct UniPoly<S> {
    pub var: Var,
    c: Vec<S>,
}

impl<S: Scalar> UniPoly<S> {
    pub fn new(var: Var, mut c: Vec<S>) -> Self {
        while c.last().is_some_and(|x| x == &S::zero()) {
            c.pop();
        }
        UniPoly { var, c }
    }

    pub fn coeffs(&self) -> &[S] {
        &self.c
    }

    pub fn coeff(&self, k: usize) -> S {
        self.c.get(k).cloned().unwrap_or_else(S::zero)
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        UniPoly::new(
            self.var,
            (0..n).map(|k| self.coeff(k) + o.coeff(k)).collect(),
        )
    }

    pub fn scale(&self, k: &S) -> Self {
        UniPoly::new(
            self.var,
            self.c.iter().map(|x| x.clone() * k.clone()).collect(),
        )
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return UniPoly::new(self.var, vec![]);
        }
        let mut c = vec![S::zero(); self.c.len() + o.c.len() - 1];
        for (i, x) in self.c.iter().enumerate() {
            for (j, y) in o.c.iter().enumerate() {
                c[i + j] = c[i + j].clone() + x.clone() * y.clone();
            }
        }
        UniPoly::new(self.var, c)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut r = UniPoly::new(self.var, vec![S::one()]);
        for _ in 0..k {
            r = r.mul(self);
        }
        r
    }

    pub fn eval(&self, x: &S) -> S {
        self.c
            .iter()
            .rev()
            .fold(S::zero(), |acc, k| acc * x.clone() + k.clone())
    }

    /// Whether the binary form of formal degree `deg` (roots at infinity
    /// included) has only even-multiplicity roots over the complex numbers,
    /// i.e. it is a constant times a square.
    pub fn is_square_form(&self, deg: usize) -> bool {
        if self.is_zero() {
            return true;
        }
        let top = self.degree().unwrap_or(0);
        // Roots at infinity have multiplicity deg - top; strip them.
        if (deg - top) % 2 == 1 {
            return false;
        }
        let low = self.c.iter().position(|x| x != &S::zero()).unwrap_or(0);
        if low % 2 == 1 {
            return false;
        }
        let core: Vec<S> = self.c[low..].to_vec();
        let n = core.len() - 1;
        if n == 0 {
            return true;
        }
        if n % 2 == 1 {
            return false;
        }
        let lead = core[n].clone();
        let monic: Vec<S> = core.iter().map(|x| x.clone() / lead.clone()).collect();
        let half = n / 2;
        // Formal square root of a monic polynomial: s has degree half.
        let mut s = vec![S::zero(); half + 1];
        s[half] = S::one();
        for k in (0..half).rev() {
            // coefficient of x^{half + k} in s^2 equals monic[half + k]
            let mut acc = S::zero();
            for i in (k + 1)..=half {
                let j = half + k - i;
                if j <= half && j > k {
                    acc = acc + s[i].clone() * s[j].clone();
                }
            }
            s[k] = (monic[half + k].clone() - acc) / S::from_i64(2);
        }
        let sq = UniPoly::new(self.var, s.clone()).mul(&UniPoly::new(self.var, s));
        (0..=n).all(|k| sq.coeff(k).approx_eq(&monic[k]))
    }
}

/// Sylvester resultant of `p` and `q` with respect to `elim`.
///
/// The result lives in the ordered pair (other variable of `p`, other
/// variable of `q`). Rows of `p` come first with descending coefficients.
pub fn sylvester_resultant<S: Scalar>(
    p: &BiPoly<S>,
    q: &BiPoly<S>,
    elim: Var,
) -> Result<BiPoly<S>, PolyError> {
    let u = p.other_var(elim)?;
    let w = q.other_var(elim)?;
    if u == w {
        return Err(PolyError::SameVariable(u));
    }
    let vars = (u, w);
    let m = p.degree_in(elim).unwrap_or(0);
    let n = q.degree_in(elim).unwrap_or(0);
    if m == 0 && n == 0 {
        return Err(PolyError::NothingToEliminate(elim));
    }
    let pc = p.coeffs_in(elim)?;
    let qc = q.coeffs_in(elim)?;
    let lift_p = |k: usize| -> BiPoly<S> {
        match pc.get(k) {
            Some(c) => {
                BiPoly::from_grid(vars, c.coeffs().iter().map(|x| vec![x.clone()]).collect())
            }
            None => BiPoly::zero(vars),
        }
    };
    let lift_q = |k: usize| -> BiPoly<S> {
        match qc.get(k) {
            Some(c) => BiPoly::from_grid(vars, vec![c.coeffs().to_vec()]),
            None => BiPoly::zero(vars),
        }
    };
    let size = m + n;
    let mut mat: Vec<Vec<BiPoly<S>>> = vec![vec![BiPoly::zero(vars); size]; size];
    for r in 0..n {
        for k in 0..=m {
            mat[r][r + k] = lift_p(m - k);
        }
    }
    for r in 0..m {
        for k in 0..=n {
            mat[n + r][r + k] = lift_q(n - k);
        }
    }
    Ok(determinant(&mat, vars))
}

/// Determinant by Laplace expansion over row subsets (column-by-column DP).
fn determinant<S: Scalar>(mat: &[Vec<BiPoly<S>>], vars: (Var, Var)) -> BiPoly<S> {
    let n = mat.len();
    let mut dp: Vec<Option<BiPoly<S>>> = vec![None; 1 << n];
    dp[0] = Some(BiPoly::constant(vars, S::one()));
    for col in 0..n {
        let mut next: Vec<Option<BiPoly<S>>> = vec![None; 1 << n];
        for (mask, entry) in dp.iter().enumerate() {
            let Some(acc) = entry else { continue };
            if (mask as u32).count_ones() as usize != col {
                continue;
            }
            for (row, cells) in mat.iter().enumerate() {
                if mask & (1 << row) != 0 || cells[col].is_zero() {
                    continue;
                }
                let above = (mask >> (row + 1)).count_ones();
                let mut term = acc.mul(&cells[col]);
                if above % 2 == 1 {
                    term = term.neg();
                }
                let slot = &mut next[mask | (1 << row)];
                *slot = Some(match slot.take() {
                    Some(t) => t.add(&term),
                    None => term,
                });
            }
        }
        dp = next;
    }
    dp[(1 << n) - 1]
        .take()
        .unwrap_or_else(|| BiPoly::zero(vars))
}

/// Exact (or tolerance-bounded) quotient `p / d`, or `None` when `d` does not divide `p`.
pub fn poly_divide_exact<S: Scalar>(
    p: &BiPoly<S>,
    d: &BiPoly<S>,
) -> Result<Option<BiPoly<S>>, PolyError> {
    if d.is_zero() {
        return Err(PolyError::DivisionByZero);
    }
    let d = d.ordered(p.vars()).or_else(|e| {
        if d.deg_u() == Some(0) && d.deg_v() == Some(0) {
            Ok(d.rename(p.vars()))
        } else {
            Err(e)
        }
    })?;
    let vars = p.vars();
    if p.is_zero() {
        return Ok(Some(BiPoly::zero(vars)));
    }
    let (pu, pv) = (p.deg_u().unwrap(), p.deg_v().unwrap());
    let (du, dv) = (d.deg_u().unwrap(), d.deg_v().unwrap());
    if du > pu || dv > pv {
        return Ok(None);
    }
    // Lex-leading term of d: highest u power, then highest v power in that row.
    let lj = d.grid()[du].iter().rposition(|x| x != &S::zero()).unwrap();
    let lc = d.coeff(du, lj);
    let scale = p.norm();
    let (qu, qv) = (pu - du, pv - dv);
    let mut r: Vec<Vec<S>> = p.grid().to_vec();
    let mut q = vec![vec![S::zero(); qv + 1]; qu + 1];
    for i in (0..=qu).rev() {
        for j in (0..=(pv - lj)).rev() {
            let target = &r[i + du][j + lj];
            if target == &S::zero() {
                continue;
            }
            if j > qv {
                // A nonzero remainder term the quotient cannot reach.
                if target.is_negligible(scale) {
                    continue;
                }
                return Ok(None);
            }
            let k = target.clone() / lc.clone();
            for (a, row) in d.grid().iter().enumerate() {
                for (b, x) in row.iter().enumerate() {
                    if x != &S::zero() {
                        let cell = &mut r[i + a][j + b];
                        *cell = cell.clone() - k.clone() * x.clone();
                    }
                }
            }
            q[i][j] = k;
        }
    }
    let ok = r.iter().flatten().all(|x| x.is_negligible(scale));
    Ok(ok.then(|| BiPoly::from_grid(vars, q)))
}

/// Rank-1 test of the 2xN matrix with columns `(nums[k], dens[k])`.
///
/// Columns that are (0, 0) are compatible with any ratio; an all-zero matrix
/// passes.
pub fn ratio_chain_holds<S: Scalar>(nums: &[S], dens: &[S]) -> bool {
    assert_eq!(
        nums.len(),
        dens.len(),
        "ratio chain needs equal-length lists"
    );
    let n = nums.len();
    for i in 0..n {
        for j in (i + 1)..n {
            let l = nums[i].clone() * dens[j].clone();
            let r = nums[j].clone() * dens[i].clone();
            if !l.approx_eq(&r) {
                return false;
            }
        }
    }
    true
}

/// The common ratio num/den of a rank-1 chain, if some denominator is nonzero.
pub fn chain_ratio<S: Scalar>(nums: &[S], dens: &[S]) -> Option<S> {
    let (k, _) = dens
        .iter()
        .enumerate()
        .filter(|(_, d)| !d.is_zero())
        .max_by(|a, b| a.1.mag().total_cmp(&b.1.mag()))?;
    Some(nums[k].clone() / dens[k].clone())
}

/// Whether two polynomials are scalar multiples of each other (both nonzero).
///
/// Float mode compares the max-normalized coefficient vectors with a looser
/// tolerance (`1e3 * eps_rel`), since factors come out of expanded resultants.
pub fn proportional<S: Scalar>(p: &BiPoly<S>, q: &BiPoly<S>) -> bool {
    let Ok(q) = q.ordered(p.vars()) else {
        return false;
    };
    if p.is_zero() || q.is_zero() {
        return false;
    }
    let du = p.grid().len().max(q.grid().len());
    let dv = p.grid()[0].len().max(q.grid()[0].len());
    let cells = (0..du).flat_map(|i| (0..dv).map(move |j| (i, j)));
    if S::EXACT {
        let (a, b): (Vec<S>, Vec<S>) = cells.map(|(i, j)| (p.coeff(i, j), q.coeff(i, j))).unzip();
        return ratio_chain_holds(&a, &b);
    }
    let (np, nq) = (p.norm(), q.norm());
    let (a, b): (Vec<f64>, Vec<f64>) = cells
        .map(|(i, j)| (p.coeff(i, j).to_f64() / np, q.coeff(i, j).to_f64() / nq))
        .unzip();
    let Some(pivot) = (0..a.len()).max_by(|&x, &y| a[x].abs().total_cmp(&a[y].abs())) else {
        return false;
    };
    let k = b[pivot] / a[pivot];
    if !k.is_finite() || k == 0.0 {
        return false;
    }
    let t = crate::scalar::tolerance();
    let tol = (t.rel * 1e3).max(t.abs);
    a.iter().zip(&b).all(|(x, y)| (x * k - y).abs() <= tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use num_rational::BigRational as Q;

    fn xy() -> (Var, Var) {
        (Var("x"), Var("y"))
    }

    #[test]
    fn linear_composition_resultant() {
        let p = BiPoly::<Q>::from_terms(
            (Var("x"), Var("y")),
            &[(1, 0, rat(1, 1)), (0, 1, rat(-1, 1))],
        );
        let q = BiPoly::<Q>::from_terms(
            (Var("y"), Var("z")),
            &[(1, 0, rat(1, 1)), (0, 1, rat(-1, 1))],
        );
        let r = sylvester_resultant(&p, &q, Var("y")).unwrap();
        let expect = BiPoly::from_terms(
            (Var("x"), Var("z")),
            &[(1, 0, rat(1, 1)), (0, 1, rat(-1, 1))],
        );
        assert!(proportional(&r, &expect));
    }

    #[test]
    fn nothing_to_eliminate() {
        let p = BiPoly::<Q>::from_terms(xy(), &[(1, 0, rat(1, 1))]);
        let q = BiPoly::<Q>::from_terms((Var("y"), Var("z")), &[(0, 1, rat(1, 1))]);
        // p has y-degree 0, q has y-degree 0
        assert_eq!(
            sylvester_resultant(&p, &q, Var("y")),
            Err(PolyError::NothingToEliminate(Var("y")))
        );
    }

    #[test]
    fn divide_examples() {
        let x_minus_y = BiPoly::<Q>::from_terms(xy(), &[(1, 0, rat(1, 1)), (0, 1, rat(-1, 1))]);
        let sq = x_minus_y.pow(2);
        assert_eq!(
            poly_divide_exact(&sq, &x_minus_y).unwrap(),
            Some(x_minus_y.clone())
        );
        let diff = BiPoly::<Q>::from_terms(xy(), &[(2, 0, rat(1, 1)), (0, 2, rat(-1, 1))]);
        let x_plus_y = BiPoly::<Q>::from_terms(xy(), &[(1, 0, rat(1, 1)), (0, 1, rat(1, 1))]);
        assert_eq!(
            poly_divide_exact(&diff, &x_plus_y).unwrap(),
            Some(x_minus_y.clone())
        );
        let x = BiPoly::<Q>::from_terms(xy(), &[(1, 0, rat(1, 1)), (0, 0, rat(1, 1))]);
        assert_eq!(poly_divide_exact(&diff, &x).unwrap(), None);
    }

    #[test]
    fn ratio_chains() {
        let one = |v: &[i64]| v.iter().map(|&k| rat(k, 1)).collect::<Vec<_>>();
        assert!(ratio_chain_holds(&one(&[1, 1, 1]), &one(&[2, 2, 2])));
        assert!(!ratio_chain_holds(&one(&[1, 1]), &one(&[2, 3])));
        assert!(ratio_chain_holds(&one(&[1, 0]), &one(&[0, 0])));
        assert!(ratio_chain_holds(&one(&[0, 0]), &one(&[0, 0])));
    }

    #[test]
    fn square_forms() {
        let v = Var("x");
        // (x^2+1)^2
        let p = UniPoly::new(
            v,
            vec![rat(1, 1), rat(0, 1), rat(2, 1), rat(0, 1), rat(1, 1)],
        );
        assert!(p.is_square_form(4));
        let p = UniPoly::new(
            v,
            vec![rat(4, 1), rat(0, 1), rat(9, 1), rat(0, 1), rat(4, 1)],
        );
        assert!(!p.is_square_form(4));
        // x^2 as a quartic form: roots 0 (double) and infinity (double)
        let p = UniPoly::new(v, vec![rat(0, 1), rat(0, 1), rat(3, 1)]);
        assert!(p.is_square_form(4));
        // cubic: simple root at infinity
        let p = UniPoly::new(v, vec![rat(1, 1), rat(0, 1), rat(0, 1), rat(1, 1)]);
        assert!(!p.is_square_form(4));
    }

    #[test]
    fn parity() {
        let p = BiPoly::<Q>::from_terms(
            xy(),
            &[
                (1, 2, rat(1, 1)),
                (2, 1, rat(-1, 1)),
                (0, 1, rat(-1, 1)),
                (1, 0, rat(1, 1)),
            ],
        );
        assert_eq!(p.parity(), Parity::OddOnly);
        // x*y + x^2 has only total degree 2 terms.
        let p = BiPoly::<Q>::from_terms(xy(), &[(1, 1, rat(1, 1)), (2, 0, rat(1, 1))]);
        assert_eq!(p.parity(), Parity::EvenOnly);
        let p = BiPoly::<Q>::from_terms(xy(), &[(1, 1, rat(1, 1)), (1, 0, rat(1, 1))]);
        assert_eq!(p.parity(), Parity::Mixed);
    }
}
