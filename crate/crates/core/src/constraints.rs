//! Sparse linear constraint systems over trigonometric coefficients and
//! their nullspaces.
//!
//! Unknowns are `fields × components × trig basis` coefficients; a function
//! `G = Σ_i e_i g^i` has one field, a 1-form `Σ_α ω_α dθ^α` has `N`.

use std::ops::Range;

use nalgebra::DMatrix;
use thiserror::Error;

use crate::linalg;
use crate::trig::TrigSpace;

/// Default cap on the number of unknowns.
pub const DEFAULT_SIZE_CAP: usize = 20_000;
/// Default relative singular-value tolerance for nullspaces.
pub const DEFAULT_NULL_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConstraintError {
    #[error("system would have {columns} unknowns, above the cap of {cap}")]
    SizeCapExceeded { columns: usize, cap: usize },
}

/// Column layout: `col = (field * components + comp) * B + t`.
#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    pub space: TrigSpace,
    pub components: usize,
    pub fields: usize,
}

impl Layout {
    /// Checks the cap before the trig space is materialised.
    pub fn checked(
        dims: usize,
        degree: u32,
        components: usize,
        fields: usize,
        cap: usize,
    ) -> Result<Layout, ConstraintError> {
        let columns = TrigSpace::size_for(dims, degree)
            .and_then(|b| b.checked_mul(components))
            .and_then(|b| b.checked_mul(fields))
            .unwrap_or(usize::MAX);
        if columns > cap {
            return Err(ConstraintError::SizeCapExceeded { columns, cap });
        }
        Ok(Layout { space: TrigSpace::new(dims, degree), components, fields })
    }

    pub fn b(&self) -> usize {
        self.space.len()
    }

    pub fn n_cols(&self) -> usize {
        self.fields * self.components * self.b()
    }

    #[inline]
    pub fn col(&self, field: usize, comp: usize, t: usize) -> usize {
        (field * self.components + comp) * self.b() + t
    }

    /// Coefficients of one scalar trig polynomial inside a solution vector.
    pub fn slice<'a>(&self, v: &'a [f64], field: usize, comp: usize) -> &'a [f64] {
        let start = self.col(field, comp, 0);
        &v[start..start + self.b()]
    }
}

/// Rows of a sparse matrix over a [`Layout`].
#[derive(Debug, Clone)]
pub struct ConstraintSystem {
    pub layout: Layout,
    rows: Vec<Vec<(usize, f64)>>,
    /// Named row ranges, e.g. `a_linear`, `closed`.
    pub groups: Vec<(String, Range<usize>)>,
}

impl ConstraintSystem {
    pub fn new(layout: Layout) -> Self {
        ConstraintSystem { layout, rows: Vec::new(), groups: Vec::new() }
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.layout.n_cols()
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// Appends a row, merging repeated columns and dropping zeros.
    pub fn push_row(&mut self, mut entries: Vec<(usize, f64)>) {
        entries.sort_by_key(|e| e.0);
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(entries.len());
        for (c, v) in entries {
            match merged.last_mut() {
                Some(last) if last.0 == c => last.1 += v,
                _ => merged.push((c, v)),
            }
        }
        merged.retain(|e| e.1 != 0.0);
        self.rows.push(merged);
    }

    /// Starts a named group; rows pushed until the next call belong to it.
    pub fn begin_group(&mut self, name: &str) {
        self.close_group();
        let at = self.rows.len();
        self.groups.push((name.to_string(), at..at));
    }

    fn close_group(&mut self) {
        let end = self.rows.len();
        if let Some(last) = self.groups.last_mut() {
            last.1.end = end;
        }
    }

    pub fn finish(mut self) -> Self {
        self.close_group();
        self
    }

    pub fn rows(&self) -> &[Vec<(usize, f64)>] {
        &self.rows
    }

    /// `max_r |row_r · v|`.
    pub fn residual(&self, v: &[f64]) -> f64 {
        self.residual_rows(0..self.rows.len(), v)
    }

    pub fn residual_rows(&self, range: Range<usize>, v: &[f64]) -> f64 {
        self.rows[range].iter().map(|r| r.iter().map(|&(c, a)| a * v[c]).sum::<f64>().abs()).fold(0.0, f64::max)
    }

    pub fn group_residual(&self, name: &str, v: &[f64]) -> Option<f64> {
        self.groups.iter().find(|g| g.0 == name).map(|g| self.residual_rows(g.1.clone(), v))
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n_rows(), self.n_cols());
        for (r, row) in self.rows.iter().enumerate() {
            for &(c, v) in row {
                m[(r, c)] = v;
            }
        }
        m
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Orthonormal nullspace basis of a constraint system.
#[derive(Debug, Clone)]
pub struct Nullspace {
    pub basis: Vec<Vec<f64>>,
    /// Singular value attached to each basis vector.
    pub singular_values: Vec<f64>,
    pub sigma_max: f64,
}

impl Nullspace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

/// Right-singular directions with singular value `≤ tol · σ_max`.
///
/// Columns are split into connected blocks (columns sharing a row) and each
/// block is decomposed on its own; the block nullspaces together span the
/// nullspace of the whole matrix. Output is ordered by ascending singular
/// value, then by leading column index. Each vector's largest entry is
/// positive.
pub fn solve_nullspace(sys: &ConstraintSystem, tol: f64) -> Nullspace {
    let n = sys.n_cols();
    let mut parent: Vec<usize> = (0..n).collect();
    for row in sys.rows() {
        if let Some(&(first, _)) = row.first() {
            let a = find(&mut parent, first);
            for &(c, _) in &row[1..] {
                let b = find(&mut parent, c);
                if a != b {
                    let (lo, hi) = (a.min(b), a.max(b));
                    parent[hi] = lo;
                }
            }
        }
    }
    // Deterministic block order: by smallest column.
    let mut block_of = vec![usize::MAX; n];
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for c in 0..n {
        let root = find(&mut parent, c);
        if block_of[root] == usize::MAX {
            block_of[root] = blocks.len();
            blocks.push(Vec::new());
        }
        let b = block_of[root];
        block_of[c] = b;
        blocks[b].push(c);
    }
    let mut block_rows: Vec<Vec<usize>> = vec![Vec::new(); blocks.len()];
    for (r, row) in sys.rows().iter().enumerate() {
        if let Some(&(first, _)) = row.first() {
            block_rows[block_of[first]].push(r);
        }
    }

    let mut decomposed: Vec<(Vec<f64>, DMatrix<f64>)> = Vec::with_capacity(blocks.len());
    let mut sigma_max = 0.0_f64;
    for (cols, rows) in blocks.iter().zip(&block_rows) {
        if rows.is_empty() {
            decomposed.push((vec![0.0; cols.len()], DMatrix::identity(cols.len(), cols.len())));
            continue;
        }
        let local: std::collections::BTreeMap<usize, usize> = cols.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let mut m = DMatrix::zeros(rows.len(), cols.len());
        for (ri, &r) in rows.iter().enumerate() {
            for &(c, v) in &sys.rows()[r] {
                m[(ri, local[&c])] = v;
            }
        }
        let (sv, v) = linalg::full_right_svd(&m);
        sigma_max = sigma_max.max(sv.iter().copied().fold(0.0, f64::max));
        decomposed.push((sv, v));
    }

    let cut = tol * sigma_max;
    let mut found: Vec<(f64, usize, Vec<f64>)> = Vec::new();
    for (cols, (sv, v)) in blocks.iter().zip(&decomposed) {
        for (i, &s) in sv.iter().enumerate() {
            if s > cut {
                continue;
            }
            let local = linalg::fix_sign(v.column(i).into_owned());
            let mut full = vec![0.0; n];
            for (k, &c) in cols.iter().enumerate() {
                full[c] = local[k];
            }
            let lead = full.iter().position(|x| x.abs() > 1e-12).unwrap_or(cols[0]);
            found.push((s, lead, full));
        }
    }
    found.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    Nullspace {
        singular_values: found.iter().map(|f| f.0).collect(),
        basis: found.into_iter().map(|f| f.2).collect(),
        sigma_max,
    }
}
