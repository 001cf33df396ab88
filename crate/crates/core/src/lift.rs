//! One-round protection matrices: construction from frames, verification of
//! the three matrix conditions, path-to-tour projection, moment matrices and
//! an exact positive-semidefiniteness test.
//!
//! Matrix index 0 is the distinguished row; edge `e` sits at index `e + 1`.

use serde::{Deserialize, Serialize};

use crate::frames::FrameFamily;
use crate::graph::{EdgeId, EdgeVector, LabeledGraph, NodeId};
use crate::polytopes::{check_cone_vector, ConstraintWitness, PolytopeError, PolytopeKind};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "Vec<Vec<Rational>>", try_from = "Vec<Vec<Rational>>")]
pub struct ProtectionMatrix {
    dim: usize,
    data: Vec<Rational>,
}

impl ProtectionMatrix {
    pub fn zeros(dim: usize) -> Self {
        ProtectionMatrix { dim, data: vec![Rational::zero(); dim * dim] }
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self, LiftError> {
        let dim = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(LiftError::NotSquare { rows: dim, cols: bad.len() });
        }
        Ok(ProtectionMatrix { dim, data: rows.into_iter().flatten().collect() })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Rational) {
        self.data[i * self.dim + j] = value;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> Vec<Vec<Rational>> {
        self.data.chunks(self.dim.max(1)).map(<[Rational]>::to_vec).collect()
    }

    /// First (i, j) with i < j and X_ij != X_ji.
    pub fn asymmetry(&self) -> Option<(usize, usize)> {
        (0..self.dim)
            .flat_map(|i| (i + 1..self.dim).map(move |j| (i, j)))
            .find(|&(i, j)| self.get(i, j) != self.get(j, i))
    }

    /// Principal submatrix keeping the indices in `keep`, in order.
    pub fn principal(&self, keep: &[usize]) -> ProtectionMatrix {
        let mut out = ProtectionMatrix::zeros(keep.len());
        for (a, &i) in keep.iter().enumerate() {
            for (b, &j) in keep.iter().enumerate() {
                out.set(a, b, self.get(i, j).clone());
            }
        }
        out
    }
}

impl From<ProtectionMatrix> for Vec<Vec<Rational>> {
    fn from(m: ProtectionMatrix) -> Self {
        m.rows()
    }
}

impl TryFrom<Vec<Vec<Rational>>> for ProtectionMatrix {
    type Error = LiftError;
    fn try_from(rows: Vec<Vec<Rational>>) -> Result<Self, LiftError> {
        ProtectionMatrix::from_rows(rows)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum LiftError {
    #[error("matrix is not square: {rows} rows, a row of length {cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix has dimension {got}, expected {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("frame family has {frames} frames for {edges} edges")]
    FamilySize { frames: usize, edges: usize },
    #[error("matrix is not symmetric at ({i}, {j})")]
    Asymmetric { i: usize, j: usize },
    #[error("removed edge {edge} has X'[0][e] = {value}, expected 1")]
    NotOne { edge: usize, value: Rational },
    #[error("X'[{row}][{edge}] = {value} differs from X'[{row}][0] = {expected} for removed edge {edge}")]
    NotProtected { row: usize, edge: usize, value: Rational, expected: Rational },
    #[error("removed index {0} out of range")]
    RemovedOutOfRange(usize),
    #[error("moment weights sum to {0}, expected 1")]
    WeightSum(Rational),
    #[error("moment weight {index} is negative: {value}")]
    NegativeWeight { index: usize, value: Rational },
    #[error("{points} points but {weights} weights")]
    WeightCount { points: usize, weights: usize },
    #[error("point {point} has non 0/1 value {value} at edge {edge}")]
    NonIntegral { point: usize, edge: usize, value: Rational },
    #[error("point {point} has {got} entries, expected {expected}")]
    PointLength { point: usize, expected: usize, got: usize },
    #[error("no points given")]
    NoPoints,
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
}

/// x^{(e)} and y^{(e)}: the scaled row X_e and complement X_0 - X_e.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowDerivedVectors {
    pub x: EdgeVector,
    pub y: EdgeVector,
}

fn check_family(l: &LabeledGraph, fam: &FrameFamily) -> Result<(), LiftError> {
    if fam.frames().len() != l.m() {
        return Err(LiftError::FamilySize { frames: fam.frames().len(), edges: l.m() });
    }
    Ok(())
}

/// The all-2/3 point and its protection matrix: 1 at (0,0), 2/3 on row 0 and
/// the diagonal, 1/3 for frame pairs and 1/2 for every other pair.
pub fn build_cgk_matrix(l: &LabeledGraph, fam: &FrameFamily) -> Result<(EdgeVector, ProtectionMatrix), LiftError> {
    check_family(l, fam)?;
    let m = l.m();
    let two_thirds = Rational::new(2, 3);
    let third = Rational::new(1, 3);
    let half = Rational::new(1, 2);
    let mut x = ProtectionMatrix::zeros(m + 1);
    x.set(0, 0, Rational::one());
    for a in 0..m {
        x.set(0, a + 1, two_thirds.clone());
        x.set(a + 1, 0, two_thirds.clone());
        x.set(a + 1, a + 1, two_thirds.clone());
        for b in 0..m {
            if a != b {
                let v = if fam.contains(EdgeId(a), EdgeId(b)) { &third } else { &half };
                x.set(a + 1, b + 1, v.clone());
            }
        }
    }
    if let Some((i, j)) = x.asymmetry() {
        return Err(LiftError::Asymmetric { i, j });
    }
    Ok((EdgeVector::constant(m, two_thirds), x))
}

/// x^{(e)}: 1 on e, 1/2 on its frame, 3/4 elsewhere.
/// y^{(e)}: 0 on e, 1 on its frame, 1/2 elsewhere.
pub fn derive_row_vectors(l: &LabeledGraph, fam: &FrameFamily, e: EdgeId) -> Result<RowDerivedVectors, LiftError> {
    check_family(l, fam)?;
    let (mut x, mut y) = (Vec::with_capacity(l.m()), Vec::with_capacity(l.m()));
    for f in l.edge_ids() {
        let (a, b) = if f == e {
            (Rational::one(), Rational::zero())
        } else if fam.contains(e, f) {
            (Rational::new(1, 2), Rational::one())
        } else {
            (Rational::new(3, 4), Rational::new(1, 2))
        };
        x.push(a);
        y.push(b);
    }
    Ok(RowDerivedVectors { x: EdgeVector::new(x), y: EdgeVector::new(y) })
}

/// Which derived vector disagrees with the matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivedSide {
    Row,
    Complement,
}

/// Checks `(3/2) X_e = (1, x^{(e)})` and `3 (X_0 - X_e) = (1, y^{(e)})` for
/// every edge; returns the first mismatch.
pub fn cross_check_rows(
    l: &LabeledGraph,
    fam: &FrameFamily,
    x: &ProtectionMatrix,
) -> Result<Option<(EdgeId, DerivedSide)>, LiftError> {
    if x.dim() != l.m() + 1 {
        return Err(LiftError::Dimension { expected: l.m() + 1, got: x.dim() });
    }
    let three_halves = Rational::new(3, 2);
    let three = Rational::from_integer(3);
    for e in l.edge_ids() {
        let d = derive_row_vectors(l, fam, e)?;
        let row = x.row(e.0 + 1);
        let scaled: Vec<Rational> = row.iter().map(|v| v * &three_halves).collect();
        if !scaled[0].is_one() || scaled[1..] != *d.x.as_slice() {
            return Ok(Some((e, DerivedSide::Row)));
        }
        let comp: Vec<Rational> = x.row(0).iter().zip(row).map(|(a, b)| (a - b) * &three).collect();
        if !comp[0].is_one() || comp[1..] != *d.y.as_slice() {
            return Ok(Some((e, DerivedSide::Complement)));
        }
    }
    Ok(None)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerifyMode {
    /// Collect every violation.
    Exhaustive,
    /// Stop at the first violation.
    FailFast,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "condition", rename_all = "snake_case")]
pub enum LiftViolation {
    /// Condition (i): X_ij != X_ji.
    Asymmetric { i: usize, j: usize, upper: Rational, lower: Rational },
    /// Condition (ii): X_0i differs from (1, x)_i.
    RowZero { index: usize, expected: Rational, got: Rational },
    /// Condition (ii): X_ii differs from (1, x)_i.
    Diagonal { index: usize, expected: Rational, got: Rational },
    /// Condition (iii): row X_e is not in the cone.
    Row { edge: EdgeId, witness: ConstraintWitness },
    /// Condition (iii): X_0 - X_e is not in the cone.
    Complement { edge: EdgeId, witness: ConstraintWitness },
}

impl std::fmt::Display for LiftViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LiftViolation::Asymmetric { i, j, upper, lower } => {
                write!(f, "symmetry: X[{i}][{j}] = {upper} but X[{j}][{i}] = {lower}")
            }
            LiftViolation::RowZero { index, expected, got } => {
                write!(f, "row 0: X[0][{index}] = {got}, expected {expected}")
            }
            LiftViolation::Diagonal { index, expected, got } => {
                write!(f, "diagonal: X[{index}][{index}] = {got}, expected {expected}")
            }
            LiftViolation::Row { edge, witness } => write!(f, "row of edge {edge} not in cone: {witness}"),
            LiftViolation::Complement { edge, witness } => {
                write!(f, "complement of edge {edge} not in cone: {witness}")
            }
        }
    }
}

/// Outcome of [`verify_one_round`]. Certified iff `violations` is empty.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OneRoundReport {
    pub polytope: PolytopeKind,
    pub dimension: usize,
    pub cone_checks: usize,
    pub violations: Vec<LiftViolation>,
}

impl OneRoundReport {
    pub fn certified(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that `X` certifies `x` in N(R) for the polytope R = `kind` on `g`:
/// (i) symmetry, (ii) row 0 and diagonal equal (1, x), (iii) every row X_e and
/// every complement X_0 - X_e lies in cone(R).
pub fn verify_one_round(
    kind: PolytopeKind,
    g: &LabeledGraph,
    x: &EdgeVector,
    mat: &ProtectionMatrix,
    mode: VerifyMode,
) -> Result<OneRoundReport, LiftError> {
    let m = g.m();
    g.check_vector(x).map_err(PolytopeError::from)?;
    if mat.dim() != m + 1 {
        return Err(LiftError::Dimension { expected: m + 1, got: mat.dim() });
    }
    let mut report = OneRoundReport { polytope: kind, dimension: m + 1, cone_checks: 0, violations: Vec::new() };
    let done = |r: &OneRoundReport| mode == VerifyMode::FailFast && !r.violations.is_empty();

    for i in 0..=m {
        for j in i + 1..=m {
            if mat.get(i, j) != mat.get(j, i) {
                report.violations.push(LiftViolation::Asymmetric {
                    i,
                    j,
                    upper: mat.get(i, j).clone(),
                    lower: mat.get(j, i).clone(),
                });
                if done(&report) {
                    return Ok(report);
                }
            }
        }
    }

    let target = |i: usize| if i == 0 { Rational::one() } else { x.as_slice()[i - 1].clone() };
    for i in 0..=m {
        let expected = target(i);
        if *mat.get(0, i) != expected {
            report.violations.push(LiftViolation::RowZero {
                index: i,
                expected: expected.clone(),
                got: mat.get(0, i).clone(),
            });
        }
        if *mat.get(i, i) != expected {
            report.violations.push(LiftViolation::Diagonal { index: i, expected, got: mat.get(i, i).clone() });
        }
        if done(&report) {
            return Ok(report);
        }
    }

    let row0 = mat.row(0);
    for e in g.edge_ids() {
        let row = mat.row(e.0 + 1);
        report.cone_checks += 1;
        if let Some(witness) = check_cone_vector(kind, g, row)? {
            report.violations.push(LiftViolation::Row { edge: e, witness });
            if done(&report) {
                return Ok(report);
            }
        }
        let comp: Vec<Rational> = row0.iter().zip(row).map(|(a, b)| a - b).collect();
        report.cone_checks += 1;
        if let Some(witness) = check_cone_vector(kind, g, &comp)? {
            report.violations.push(LiftViolation::Complement { edge: e, witness });
            if done(&report) {
                return Ok(report);
            }
        }
    }
    Ok(report)
}

/// Deletes the rows and columns of the edges in `removed` from a protection
/// matrix for the larger graph. Every removed edge must have X'_0e = 1, and
/// then every row must satisfy X'_{r,e} = X'_{r,0}; both are checked.
pub fn project_path_tour(xp: &ProtectionMatrix, removed: &[EdgeId]) -> Result<ProtectionMatrix, LiftError> {
    let dim = xp.dim();
    for &e in removed {
        if e.0 + 1 >= dim {
            return Err(LiftError::RemovedOutOfRange(e.0));
        }
    }
    for &e in removed {
        let col = e.0 + 1;
        if !xp.get(0, col).is_one() {
            return Err(LiftError::NotOne { edge: e.0, value: xp.get(0, col).clone() });
        }
    }
    for row in 0..dim {
        for &e in removed {
            let col = e.0 + 1;
            if xp.get(row, col) != xp.get(row, 0) {
                return Err(LiftError::NotProtected {
                    row,
                    edge: e.0,
                    value: xp.get(row, col).clone(),
                    expected: xp.get(row, 0).clone(),
                });
            }
        }
    }
    let keep: Vec<usize> = (0..dim).filter(|&i| i == 0 || !removed.contains(&EdgeId(i - 1))).collect();
    Ok(xp.principal(&keep))
}

/// Projects a point the same way as [`project_path_tour`] projects its matrix.
pub fn project_point(x: &EdgeVector, removed: &[EdgeId]) -> EdgeVector {
    x.iter().enumerate().filter(|(i, _)| !removed.contains(&EdgeId(*i))).map(|(_, v)| v.clone()).collect()
}

/// `x = sum w_i x_i` and `X = sum w_i (1, x_i)(1, x_i)^T` over 0/1 points.
pub fn moment_matrix(points: &[EdgeVector], weights: &[Rational]) -> Result<(EdgeVector, ProtectionMatrix), LiftError> {
    if points.is_empty() {
        return Err(LiftError::NoPoints);
    }
    if points.len() != weights.len() {
        return Err(LiftError::WeightCount { points: points.len(), weights: weights.len() });
    }
    if let Some((index, value)) = weights.iter().enumerate().find(|(_, w)| w.is_negative()) {
        return Err(LiftError::NegativeWeight { index, value: value.clone() });
    }
    let total: Rational = weights.iter().sum();
    if !total.is_one() {
        return Err(LiftError::WeightSum(total));
    }
    let m = points[0].len();
    for (p, pt) in points.iter().enumerate() {
        if pt.len() != m {
            return Err(LiftError::PointLength { point: p, expected: m, got: pt.len() });
        }
        if let Some((edge, value)) = pt.iter().enumerate().find(|(_, v)| !v.is_zero() && !v.is_one()) {
            return Err(LiftError::NonIntegral { point: p, edge, value: value.clone() });
        }
    }
    let mut mat = ProtectionMatrix::zeros(m + 1);
    let mut x = EdgeVector::zeros(m);
    for (pt, w) in points.iter().zip(weights) {
        let lifted: Vec<bool> = std::iter::once(true).chain(pt.iter().map(Rational::is_one)).collect();
        for i in 0..=m {
            if !lifted[i] {
                continue;
            }
            for j in 0..=m {
                if lifted[j] {
                    let v = mat.get(i, j) + w;
                    mat.set(i, j, v);
                }
            }
        }
        for e in 0..m {
            if lifted[e + 1] {
                x[EdgeId(e)] += w;
            }
        }
    }
    Ok((x, mat))
}

/// Exact test of X being positive semidefinite by symmetric elimination.
pub fn psd_check(mat: &ProtectionMatrix) -> Result<bool, LiftError> {
    if let Some((i, j)) = mat.asymmetry() {
        return Err(LiftError::Asymmetric { i, j });
    }
    let n = mat.dim();
    let mut a = mat.rows();
    for k in 0..n {
        let pivot = a[k][k].clone();
        if pivot.is_negative() {
            return Ok(false);
        }
        if pivot.is_zero() {
            if a[k][k + 1..].iter().any(|v| !v.is_zero()) {
                return Ok(false);
            }
            continue;
        }
        let inv = pivot.recip();
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let factor = &a[i][k] * &inv;
            for j in k + 1..n {
                if !a[k][j].is_zero() {
                    let delta = &factor * &a[k][j];
                    a[i][j] -= delta;
                }
            }
        }
    }
    Ok(true)
}

/// The five-node path/tour example: G has edges s-a, a-b, b-t, s-b, a-t and
/// G' adds the path s-c-t. Returns (G, G', removed edges of G', the two
/// hamiltonian cycles of G' as 0/1 points).
pub fn path_tour_gadget() -> (LabeledGraph, LabeledGraph, Vec<EdgeId>, Vec<EdgeVector>) {
    let (s, a, b, t, c) = (NodeId(0), NodeId(1), NodeId(2), NodeId(3), NodeId(4));
    let base = [(s, a), (a, b), (b, t), (s, b), (a, t)];
    let one = Rational::one();
    let mut g = LabeledGraph::new(false, 4).expect("n >= 1");
    let mut gp = LabeledGraph::new(false, 5).expect("n >= 1");
    for &(u, v) in &base {
        g.add_edge(u, v, one.clone()).expect("valid edge");
        gp.add_edge(u, v, one.clone()).expect("valid edge");
    }
    let sc = gp.add_edge(s, c, one.clone()).expect("valid edge");
    let ct = gp.add_edge(c, t, one).expect("valid edge");
    g.set_terminals(Some(s), Some(t)).expect("in range");
    gp.set_terminals(Some(s), Some(t)).expect("in range");
    let tour = |members: &[usize]| -> EdgeVector {
        (0..gp.m()).map(|e| if members.contains(&e) { Rational::one() } else { Rational::zero() }).collect()
    };
    // s-c-t-b-a-s and s-c-t-a-b-s.
    let tours = vec![tour(&[0, 1, 2, 5, 6]), tour(&[1, 3, 4, 5, 6])];
    (g, gp, vec![sc, ct], tours)
}
