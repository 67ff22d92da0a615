//! Sparse matrices, direct factorizations and the symmetric generalized
//! eigen-solver shared by the potential-theory and cone modules.
//!
//! Matrices are assembled as triplets into a compact CSR form. Direct solves
//! go through faer's sparse Cholesky (symmetric positive definite systems)
//! or sparse LU (everything else).

use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::{Mat, Side};

use crate::error::{Error, Result};

/// Square sparse matrix in compressed-row form.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds an `n x n` matrix, summing duplicate entries.
    pub fn from_triplets(n: usize, mut entries: Vec<(usize, usize, f64)>) -> Self {
        entries.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut row_ptr = vec![0usize; n + 1];
        let mut col_idx = Vec::with_capacity(entries.len());
        let mut values: Vec<f64> = Vec::with_capacity(entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in entries {
            debug_assert!(r < n && c < n);
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
                continue;
            }
            row_ptr[r + 1] += 1;
            col_idx.push(c);
            values.push(v);
            last = Some((r, c));
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self { n, row_ptr, col_idx, values }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (s, e) = (self.row_ptr[i], self.row_ptr[i + 1]);
        self.col_idx[s..e].iter().copied().zip(self.values[s..e].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.row(i).filter(|&(c, _)| c == j).map(|(_, v)| v).sum()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        (0..self.n).map(|i| self.row(i).map(|(j, v)| v * x[j]).sum()).collect()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).map(|(_, v)| v).sum()).collect()
    }

    /// Principal submatrix on `keep` (in the given order).
    pub fn principal_submatrix(&self, keep: &[usize]) -> CsrMatrix {
        let mut local = vec![usize::MAX; self.n];
        for (k, &g) in keep.iter().enumerate() {
            local[g] = k;
        }
        let mut entries = Vec::new();
        for (k, &g) in keep.iter().enumerate() {
            for (c, v) in self.row(g) {
                if local[c] != usize::MAX {
                    entries.push((k, local[c], v));
                }
            }
        }
        CsrMatrix::from_triplets(keep.len(), entries)
    }

    /// `self + alpha * diag(d)`.
    pub fn add_diagonal(&self, alpha: f64, d: &[f64]) -> CsrMatrix {
        let mut entries: Vec<(usize, usize, f64)> = (0..self.n)
            .flat_map(|i| self.row(i).map(move |(j, v)| (i, j, v)))
            .collect();
        entries.extend(d.iter().enumerate().map(|(i, &v)| (i, i, alpha * v)));
        CsrMatrix::from_triplets(self.n, entries)
    }

    pub fn is_symmetric(&self, rel_tol: f64) -> bool {
        let scale = self.values.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
        (0..self.n).all(|i| {
            self.row(i)
                .all(|(j, v)| (v - self.get(j, i)).abs() <= rel_tol * scale)
        })
    }

    /// Largest off-diagonal entry (used for M-matrix checks).
    pub fn max_offdiagonal(&self) -> f64 {
        let mut m = f64::NEG_INFINITY;
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                if i != j {
                    m = m.max(v);
                }
            }
        }
        m
    }

    fn to_faer(&self) -> Result<SparseColMat<usize, f64>> {
        let trips: Vec<Triplet<usize, usize, f64>> = (0..self.n)
            .flat_map(|i| self.row(i).map(move |(j, v)| Triplet::new(i, j, v)))
            .collect();
        SparseColMat::try_new_from_triplets(self.n, self.n, &trips)
            .map_err(|e| Error::SingularSystem(format!("{e:?}")))
    }

    /// Writes `(row, col, value)` lines for external verification.
    pub fn coordinate_text(&self) -> String {
        let mut out = String::from("row col value\n");
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                out.push_str(&format!("{i} {j} {v:.17e}\n"));
            }
        }
        out
    }
}

/// A reusable direct factorization.
pub enum Factorization {
    Cholesky(faer::sparse::linalg::solvers::Llt<usize, f64>),
    Lu(faer::sparse::linalg::solvers::Lu<usize, f64>),
}

impl std::fmt::Debug for Factorization {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Factorization::Cholesky(_) => f.write_str("Factorization::Cholesky"),
            Factorization::Lu(_) => f.write_str("Factorization::Lu"),
        }
    }
}

impl Factorization {
    /// Cholesky factorization; fails when the matrix is not positive definite.
    pub fn cholesky(a: &CsrMatrix) -> Result<Self> {
        let m = a.to_faer()?;
        m.sp_cholesky(Side::Lower)
            .map(Factorization::Cholesky)
            .map_err(|e| Error::SingularSystem(format!("cholesky: {e:?}")))
    }

    pub fn lu(a: &CsrMatrix) -> Result<Self> {
        let m = a.to_faer()?;
        m.sp_lu()
            .map(Factorization::Lu)
            .map_err(|e| Error::SingularSystem(format!("lu: {e:?}")))
    }

    /// Cholesky when `symmetric`, falling back to LU otherwise.
    pub fn auto(a: &CsrMatrix, symmetric: bool) -> Result<Self> {
        if symmetric {
            Self::cholesky(a)
        } else {
            Self::lu(a)
        }
    }

    pub fn is_cholesky(&self) -> bool {
        matches!(self, Factorization::Cholesky(_))
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let b = Mat::<f64>::from_fn(rhs.len(), 1, |i, _| rhs[i]);
        let x = match self {
            Factorization::Cholesky(f) => f.solve(&b),
            Factorization::Lu(f) => f.solve(&b),
        };
        let out: Vec<f64> = (0..rhs.len()).map(|i| x[(i, 0)]).collect();
        if out.iter().any(|v| !v.is_finite()) {
            return Err(Error::SingularSystem("non-finite solution".into()));
        }
        Ok(out)
    }
}

/// Result of [`smallest_eigenpair`].
#[derive(Debug, Clone)]
pub struct EigenPair {
    pub value: f64,
    /// Eigenvector scaled to unit `M`-norm with a non-negative sum.
    pub vector: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct EigenOptions {
    pub max_iterations: usize,
    /// Relative residual `|Kx - θMx| / |Kx|` at which iteration stops.
    pub tolerance: f64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self { max_iterations: 500, tolerance: 1e-10 }
    }
}

fn m_dot(a: &[f64], b: &[f64], m: &[f64]) -> f64 {
    a.iter().zip(b).zip(m).map(|((x, y), w)| x * y * w).sum()
}

fn rayleigh(k: &CsrMatrix, m: &[f64], x: &[f64]) -> (f64, f64) {
    let kx = k.matvec(x);
    let num: f64 = x.iter().zip(&kx).map(|(a, b)| a * b).sum();
    let den = m_dot(x, x, m);
    let theta = num / den;
    let res: f64 = kx
        .iter()
        .zip(x)
        .zip(m)
        .map(|((kv, xv), w)| (kv - theta * w * xv).powi(2))
        .sum::<f64>()
        .sqrt();
    let scale = kx.iter().map(|v| v * v).sum::<f64>().sqrt().max(theta.abs() * den.sqrt()).max(1e-300);
    (theta, res / scale)
}

/// Smallest eigenpair of the symmetric pencil `K x = λ M x` with `M` a
/// positive diagonal.
///
/// Inverse iteration is run with a shift below the spectrum (a Gershgorin
/// bound of `M^{-1/2} K M^{-1/2}`), so the shifted matrix stays positive
/// definite and the iteration is attracted to the bottom eigenvalue. Once the
/// Rayleigh quotient settles, a few Rayleigh-quotient steps polish it.
pub fn smallest_eigenpair(k: &CsrMatrix, mass: &[f64], opts: EigenOptions) -> Result<EigenPair> {
    let n = k.dim();
    if n == 0 || mass.len() != n {
        return Err(Error::InvalidInput("empty eigenproblem or mass size mismatch".into()));
    }
    if mass.iter().any(|&w| !(w > 0.0)) {
        return Err(Error::NonPositive("eigenproblem mass".into()));
    }
    let sq: Vec<f64> = mass.iter().map(|w| w.sqrt()).collect();
    let mut lower = f64::INFINITY;
    for i in 0..n {
        let mut center = 0.0;
        let mut radius = 0.0;
        for (j, v) in k.row(i) {
            if i == j {
                center += v / mass[i];
            } else {
                radius += v.abs() / (sq[i] * sq[j]);
            }
        }
        lower = lower.min(center - radius);
    }
    let shift = lower - 1e-8 * lower.abs().max(1.0);
    let shifted = k.add_diagonal(-shift, mass);
    let fac = Factorization::cholesky(&shifted)?;

    let mut x: Vec<f64> = vec![1.0; n];
    let nrm = m_dot(&x, &x, mass).sqrt();
    x.iter_mut().for_each(|v| *v /= nrm);
    let mut theta = f64::INFINITY;
    let mut residual = f64::INFINITY;
    let mut iterations = 0;

    // Phase 1: fixed-shift inverse iteration.
    for it in 0..opts.max_iterations {
        iterations = it + 1;
        let rhs: Vec<f64> = x.iter().zip(mass).map(|(a, w)| a * w).collect();
        let mut y = fac.solve(&rhs)?;
        let nrm = m_dot(&y, &y, mass).sqrt();
        y.iter_mut().for_each(|v| *v /= nrm);
        let (t, r) = rayleigh(k, mass, &y);
        x = y;
        residual = r;
        let settled = (t - theta).abs() <= 1e-9 * t.abs().max(1e-12);
        theta = t;
        if residual <= opts.tolerance || (settled && residual < 1e-4) {
            break;
        }
    }

    // Phase 2: Rayleigh-quotient polishing.
    let mut rq_steps = 0;
    while residual > opts.tolerance && rq_steps < 8 {
        rq_steps += 1;
        let sh = k.add_diagonal(-theta, mass);
        let Ok(f) = Factorization::lu(&sh) else { break };
        let rhs: Vec<f64> = x.iter().zip(mass).map(|(a, w)| a * w).collect();
        let Ok(mut y) = f.solve(&rhs) else { break };
        let nrm = m_dot(&y, &y, mass).sqrt();
        if !(nrm.is_finite() && nrm > 0.0) {
            break;
        }
        y.iter_mut().for_each(|v| *v /= nrm);
        let (t, r) = rayleigh(k, mass, &y);
        if r < residual {
            x = y;
            theta = t;
            residual = r;
        } else {
            break;
        }
    }
    iterations += rq_steps;

    if residual > opts.tolerance.max(1e-7) {
        return Err(Error::EigenNoConvergence { iterations, residual });
    }
    if x.iter().sum::<f64>() < 0.0 {
        x.iter_mut().for_each(|v| *v = -*v);
    }
    Ok(EigenPair { value: theta, vector: x, iterations, residual })
}

/// Least-squares line `y = slope * x + intercept`; returns
/// `(slope, intercept, max |residual|)`.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let max_res = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - slope * x - intercept).abs())
        .fold(0.0, f64::max);
    (slope, intercept, max_res)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplace_1d(n: usize) -> CsrMatrix {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            if i > 0 {
                t.push((i, i - 1, -1.0));
            }
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
            }
        }
        CsrMatrix::from_triplets(n, t)
    }

    #[test]
    fn duplicates_are_summed() {
        let a = CsrMatrix::from_triplets(2, vec![(0, 0, 1.0), (0, 0, 2.0), (1, 0, -1.0)]);
        assert_eq!(a.get(0, 0), 3.0);
        assert_eq!(a.get(1, 0), -1.0);
        assert_eq!(a.nnz(), 2);
    }

    #[test]
    fn cholesky_solves_tridiagonal() {
        let a = laplace_1d(50);
        let f = Factorization::cholesky(&a).unwrap();
        let x: Vec<f64> = (0..50).map(|i| (i as f64).sin()).collect();
        let b = a.matvec(&x);
        let y = f.solve(&b).unwrap();
        for (u, v) in x.iter().zip(&y) {
            assert!((u - v).abs() < 1e-10);
        }
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = laplace_1d(10).add_diagonal(-3.0, &vec![1.0; 10]);
        assert!(Factorization::cholesky(&a).is_err());
        assert!(Factorization::lu(&a).is_ok());
    }

    #[test]
    fn smallest_eigenvalue_of_discrete_laplacian() {
        let n = 100;
        let a = laplace_1d(n);
        let pair = smallest_eigenpair(&a, &vec![1.0; n], EigenOptions::default()).unwrap();
        let exact = 2.0 - 2.0 * (std::f64::consts::PI / (n as f64 + 1.0)).cos();
        assert!((pair.value - exact).abs() < 1e-10, "{} vs {}", pair.value, exact);
        assert!(pair.vector.iter().all(|&v| v > 0.0));
    }

    #[test]
    fn smallest_eigenvalue_can_be_negative() {
        let n = 40;
        let a = laplace_1d(n).add_diagonal(-1.0, &vec![1.0; n]);
        let pair = smallest_eigenpair(&a, &vec![1.0; n], EigenOptions::default()).unwrap();
        let exact = 1.0 - 2.0 * (std::f64::consts::PI / (n as f64 + 1.0)).cos();
        assert!((pair.value - exact).abs() < 1e-9);
    }

    #[test]
    fn line_fit_recovers_slope() {
        let xs: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| -2.0 * x + 1.0).collect();
        let (s, b, r) = fit_line(&xs, &ys);
        assert!((s + 2.0).abs() < 1e-12 && (b - 1.0).abs() < 1e-12 && r < 1e-12);
    }
}
