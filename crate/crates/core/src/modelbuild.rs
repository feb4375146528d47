//! Quadric models of `X(ℓ)` from the slopes of one curve.
//!
//! A point of the fiber over the curve is a symplectic basis `(T′, U′)` up to
//! sign. A torsion index `(i, j)` names the point `[i]T′ ⊕ [j]U′` there, so
//! every generator is evaluated by re-indexing one slope vector.
//!
//! Weight-2 generators are products `λ_P λ_Q`. A pivot basis `s₀ … s_L` of
//! their value space gives the projective embedding, and the kernel of the
//! evaluation map on `Sym²` gives the quadrics.

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::curve::{enumerate_fiber_bases, SymplecticBasis, TorsionIndex, TorsionTable};
use crate::error::{Error, Result};
use crate::exactfield::{
    descriptor_to_json, element_to_json, FieldDescriptor, FieldElement, Matrix,
};
use crate::series::{SeriesContext, DEFAULT_ORDER};

/// `λ_P` for every `P ∈ E[ℓ]`, stored at `i·ℓ + j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlopeVector {
    level: u32,
    values: Vec<FieldElement>,
}

impl SlopeVector {
    pub fn get(&self, idx: TorsionIndex) -> &FieldElement {
        &self.values[(idx.i * self.level + idx.j) as usize]
    }

    /// The slope of index `(i, j)` read in the marking `basis`.
    pub fn at_fiber_point(&self, basis: &SymplecticBasis, idx: TorsionIndex) -> &FieldElement {
        let l = self.level;
        let i = (idx.i * basis.t.i + idx.j * basis.u.i) % l;
        let j = (idx.i * basis.t.j + idx.j * basis.u.j) % l;
        self.get(TorsionIndex::new(i, j))
    }
}

pub fn slope_vector(table: &TorsionTable) -> Result<SlopeVector> {
    let c = table.curve();
    if table.level() < 3 {
        return Err(Error::PreconditionViolation(
            "slope vectors need level at least 3".into(),
        ));
    }
    if c.a.is_zero() || c.b.is_zero() {
        return Err(Error::PreconditionViolation(
            "curve has extra automorphisms (a·b = 0)".into(),
        ));
    }
    let ctx = SeriesContext::new(table, DEFAULT_ORDER)?;
    Ok(SlopeVector {
        level: table.level(),
        values: table.indices().map(|i| ctx.lambda(i).clone()).collect(),
    })
}

/// A generator: `λ_P λ_Q` in weight 2, or a product of two weight-2 basis rows in weight 4.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Generator {
    Pair(TorsionIndex, TorsionIndex),
    Product(usize, usize),
}

#[derive(Clone, Debug)]
pub struct ValueMatrix {
    pub rows: Vec<Generator>,
    pub columns: Vec<SymplecticBasis>,
    pub values: Matrix,
}

/// Unordered pairs of nonzero indices modulo `(P, Q) ~ (⊖P, ⊖Q)`, in index order.
pub fn weight_two_generators(table: &TorsionTable) -> Vec<Generator> {
    let nz: Vec<TorsionIndex> = table.nonzero_indices().collect();
    let mut out = Vec::new();
    for (k, &p) in nz.iter().enumerate() {
        for &q in &nz[k..] {
            let (np, nq) = (table.neg(p), table.neg(q));
            let mirror = if np <= nq { (np, nq) } else { (nq, np) };
            if (p, q) <= mirror {
                out.push(Generator::Pair(p, q));
            }
        }
    }
    out
}

fn pair_matrix(
    sv: &SlopeVector,
    rows: &[Generator],
    columns: &[SymplecticBasis],
) -> Result<Matrix> {
    let field = sv.values[0].field().clone();
    let data: Vec<Vec<FieldElement>> = rows
        .par_iter()
        .map(|g| match *g {
            Generator::Pair(p, q) => columns
                .iter()
                .map(|b| sv.at_fiber_point(b, p) * sv.at_fiber_point(b, q))
                .collect(),
            Generator::Product(..) => unreachable!("pair rows only"),
        })
        .collect();
    if data.is_empty() {
        return Ok(Matrix::zeros(&field, 0, columns.len()));
    }
    Matrix::from_rows(&field, data)
}

fn sym2_pairs(dim: usize) -> Vec<(usize, usize)> {
    (0..dim)
        .flat_map(|j| (j..dim).map(move |k| (j, k)))
        .collect()
}

fn product_matrix(basis_rows: &Matrix) -> Result<(Vec<Generator>, Matrix)> {
    let pairs = sym2_pairs(basis_rows.rows());
    let data: Vec<Vec<FieldElement>> = pairs
        .par_iter()
        .map(|&(j, k)| {
            basis_rows
                .row(j)
                .iter()
                .zip(basis_rows.row(k))
                .map(|(a, b)| a * b)
                .collect()
        })
        .collect();
    let m = Matrix::from_rows(basis_rows.field(), data)?;
    Ok((
        pairs
            .into_iter()
            .map(|(j, k)| Generator::Product(j, k))
            .collect(),
        m,
    ))
}

fn select_rows(m: &Matrix, rows: &[usize]) -> Result<Matrix> {
    Matrix::from_rows(m.field(), rows.iter().map(|&r| m.row(r).to_vec()).collect())
}

/// Values of the weight-2 or weight-4 generators on every fiber point.
pub fn build_value_matrix(table: &TorsionTable, weight: u32) -> Result<ValueMatrix> {
    let sv = slope_vector(table)?;
    let columns = enumerate_fiber_bases(table)?;
    if columns.is_empty() {
        return Err(Error::FiberEnumerationFailure("no symplectic bases".into()));
    }
    let rows = weight_two_generators(table);
    let w2 = pair_matrix(&sv, &rows, &columns)?;
    match weight {
        2 => Ok(ValueMatrix {
            rows,
            columns,
            values: w2,
        }),
        4 => {
            let basis = select_rows(&w2, &w2.independent_rows())?;
            let (rows, values) = product_matrix(&basis)?;
            Ok(ValueMatrix {
                rows,
                columns,
                values,
            })
        }
        w => Err(Error::PreconditionViolation(format!(
            "weight {w} is not 2 or 4"
        ))),
    }
}

/// Dimensions predicted by the genus and cusp count of `X(ℓ)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExpectedDimensions {
    pub fiber: usize,
    pub genus: usize,
    pub dim_v: usize,
    pub dim_vp: usize,
}

pub fn expected_dimensions(level: u32) -> ExpectedDimensions {
    let l = level as i64;
    let mut sl2 = l * l * l;
    let mut m = l;
    let mut q = 2;
    while m > 1 {
        if m % q == 0 {
            sl2 = sl2 / (q * q) * (q * q - 1);
            while m % q == 0 {
                m /= q;
            }
        }
        q += 1;
    }
    let n = sl2 / 2;
    // g = 1 + N(ℓ − 6)/(12ℓ); the line bundle of weight 1 has degree N/12.
    let genus = 1 + n * (l - 6) / (12 * l);
    ExpectedDimensions {
        fiber: n as usize,
        genus: genus as usize,
        dim_v: (n / 6 - genus + 1) as usize,
        dim_vp: (n / 3 - genus + 1) as usize,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Diagnostics {
    pub dim_v: usize,
    pub dim_vp: usize,
    pub kernel: usize,
    pub fiber: usize,
}

/// A quadric `Σ_{j ≤ k} c_{jk} s_j s_k`.
pub type Quadric = Vec<(usize, usize, FieldElement)>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadricModel {
    pub level: u32,
    pub desc: FieldDescriptor,
    pub basis: Vec<(TorsionIndex, TorsionIndex)>,
    pub quadrics: Vec<Quadric>,
    pub diagnostics: Diagnostics,
}

pub fn build_model(table: &TorsionTable) -> Result<QuadricModel> {
    let l = table.level();
    let expected = expected_dimensions(l);
    let sv = slope_vector(table)?;
    let columns = enumerate_fiber_bases(table)?;
    if columns.len() != expected.fiber {
        return Err(Error::FiberEnumerationFailure(format!(
            "{} fiber points, expected {}",
            columns.len(),
            expected.fiber
        )));
    }
    let rows = weight_two_generators(table);
    let w2 = pair_matrix(&sv, &rows, &columns)?;
    let pivots = w2.independent_rows();
    if pivots.len() != expected.dim_v {
        return Err(Error::RetryNeeded {
            got: pivots.len(),
            expected: expected.dim_v,
        });
    }
    let basis_rows = select_rows(&w2, &pivots)?;
    let (_, w4) = product_matrix(&basis_rows)?;
    let kernel = w4.transpose().kernel_basis();
    let sym2 = w4.rows();
    if kernel.len() + expected.dim_vp != sym2 {
        return Err(Error::DegenerateModel(format!(
            "kernel {} but Sym² {} − dim V′ {}",
            kernel.len(),
            sym2,
            expected.dim_vp
        )));
    }
    let pairs = sym2_pairs(expected.dim_v);
    let quadrics = kernel
        .into_iter()
        .map(|v| {
            pairs
                .iter()
                .zip(v)
                .filter(|(_, c)| !c.is_zero())
                .map(|(&(j, k), c)| (j, k, c))
                .collect()
        })
        .collect::<Vec<Quadric>>();
    let basis = pivots
        .iter()
        .map(|&r| match rows[r] {
            Generator::Pair(p, q) => (p, q),
            Generator::Product(..) => unreachable!("weight-2 rows are pairs"),
        })
        .collect();
    Ok(QuadricModel {
        level: l,
        desc: table.desc().clone(),
        basis,
        diagnostics: Diagnostics {
            dim_v: expected.dim_v,
            dim_vp: sym2 - quadrics.len(),
            kernel: quadrics.len(),
            fiber: columns.len(),
        },
        quadrics,
    })
}

impl QuadricModel {
    /// The basis forms `s_j` at every fiber point of `table`, one row per form.
    pub fn basis_values(&self, table: &TorsionTable) -> Result<Matrix> {
        let sv = slope_vector(table)?;
        let columns = enumerate_fiber_bases(table)?;
        let rows: Vec<Generator> = self
            .basis
            .iter()
            .map(|&(p, q)| Generator::Pair(p, q))
            .collect();
        pair_matrix(&sv, &rows, &columns)
    }

    pub fn eval_quadric(&self, q: &Quadric, point: &[FieldElement]) -> FieldElement {
        q.iter().fold(self.desc.field.zero(), |acc, (j, k, c)| {
            &acc + &(c * &(&point[*j] * &point[*k]))
        })
    }

    /// Symmetric Gram matrix `M` with `Q(s) = ½ sᵀMs`: off-diagonal `c_jk`, diagonal `2c_jj`.
    pub fn gram_matrix(&self, q: &Quadric) -> Result<Matrix> {
        let f = &self.desc.field;
        let n = self.basis.len();
        let mut m = Matrix::zeros(f, n, n);
        for (j, k, c) in q {
            if j == k {
                m.set(*j, *j, &f.int(2) * c);
            } else {
                m.set(*j, *k, c.clone());
                m.set(*k, *j, c.clone());
            }
        }
        Ok(m)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "level": self.level,
            "field": descriptor_to_json(&self.desc),
            "basis": self.basis.iter().map(|(p, q)| [p.key(), q.key()]).collect::<Vec<_>>(),
            "quadrics": self.quadrics.iter().map(|q| q.iter().map(|(j, k, c)| json!({
                "j": j, "k": k, "c": element_to_json(c),
            })).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "diagnostics": {
                "dimV": self.diagnostics.dim_v,
                "dimVp": self.diagnostics.dim_vp,
                "kernel": self.diagnostics.kernel,
                "N": self.diagnostics.fiber,
            },
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelCheck {
    pub fiber: usize,
    pub quadrics: usize,
    /// `(quadric, fiber column)` pairs where the quadric does not vanish.
    pub failures: Vec<(usize, usize)>,
}

impl ModelCheck {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json(&self) -> Value {
        json!({"fiber": self.fiber, "quadrics": self.quadrics, "failures": self.failures})
    }
}

/// Evaluates the model's basis recipe on another curve's fiber and checks
/// that every quadric vanishes there.
pub fn verify_model(model: &QuadricModel, table: &TorsionTable) -> Result<ModelCheck> {
    let d = table.desc();
    if d.field != model.desc.field || d.level != model.level || d.zeta != model.desc.zeta {
        return Err(Error::ConventionMismatch);
    }
    let values = model.basis_values(table)?.transpose();
    let failures = (0..values.rows())
        .into_par_iter()
        .flat_map_iter(|col| {
            let point = values.row(col);
            model
                .quadrics
                .iter()
                .enumerate()
                .filter(|(_, q)| !model.eval_quadric(q, point).is_zero())
                .map(move |(qi, _)| (qi, col))
                .collect::<Vec<_>>()
        })
        .collect();
    Ok(ModelCheck {
        fiber: values.rows(),
        quadrics: model.quadrics.len(),
        failures,
    })
}
