//! JSON encodings for polynomials, matrices, maps, states, zero curves and
//! certificates. Scalars are strings: `p/q` rationals in the exact regime,
//! decimals in the floating regime.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::choi::{MatrixMap, Orientation};
use crate::error::{Error, Result};
use crate::fixtures::Fixture;
use crate::linalg::{HermitianMatrix, Matrix};
use crate::poly::{Block, ExponentPair, HermitianPolynomial, Poly};
use crate::scalar::{is_exact_literal, parse_f64, GaussRat, Regime, Scalar};
use crate::sos::{GramBasis, GramCertificate, MomentCertificate};
use crate::states::DensityMatrix;
use crate::zeros::{ProofReport, ZeroCurve};

/// A scalar as written in JSON: `"3/4"`, `{"re": "1", "im": "-2"}` or a number.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarJson {
    Text(String),
    Number(serde_json::Number),
    Complex {
        re: Box<ScalarJson>,
        #[serde(default = "ScalarJson::zero")]
        im: Box<ScalarJson>,
    },
}

impl ScalarJson {
    fn zero() -> Box<ScalarJson> {
        Box::new(ScalarJson::Text("0".into()))
    }

    fn text(&self) -> Result<String> {
        match self {
            ScalarJson::Text(s) => Ok(s.clone()),
            ScalarJson::Number(n) => Ok(n.to_string()),
            ScalarJson::Complex { .. } => Err(Error::Parse("nested complex scalar".into())),
        }
    }

    pub fn parse<K: Scalar>(&self) -> Result<K> {
        match self {
            ScalarJson::Complex { re, im } => K::parse(&re.text()?, &im.text()?),
            other => K::parse(&other.text()?, "0"),
        }
    }

    pub fn from_scalar<K: Scalar>(k: &K) -> ScalarJson {
        let (re, im) = k.to_strings();
        ScalarJson::Complex {
            re: Box::new(ScalarJson::Text(re)),
            im: Box::new(ScalarJson::Text(im)),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MonomialJson {
    pub u: Vec<u32>,
    pub v: Vec<u32>,
}

impl MonomialJson {
    fn from_pair(e: &ExponentPair) -> Self {
        MonomialJson {
            u: e.u.clone(),
            v: e.v.clone(),
        }
    }

    fn to_pair(&self, nvars: usize) -> Result<ExponentPair> {
        if self.u.len() != nvars || self.v.len() != nvars {
            return Err(Error::Dimension(format!(
                "monomial has {}+{} exponents, expected {nvars}",
                self.u.len(),
                self.v.len()
            )));
        }
        Ok(ExponentPair::new(self.u.clone(), self.v.clone()))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TermJson {
    pub u: Vec<u32>,
    pub v: Vec<u32>,
    pub re: ScalarJson,
    #[serde(default = "ScalarJson::zero")]
    pub im: Box<ScalarJson>,
}

impl TermJson {
    fn coeff<K: Scalar>(&self) -> Result<K> {
        ScalarJson::Complex {
            re: Box::new(self.re.clone()),
            im: self.im.clone(),
        }
        .parse()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolyJson {
    pub nvars: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub names: Option<Vec<String>>,
    #[serde(default)]
    pub blocks: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block_names: Option<Vec<String>>,
    pub terms: Vec<TermJson>,
}

fn default_block_names(k: usize) -> Vec<String> {
    match k {
        2 => vec!["x".into(), "y".into()],
        _ => (1..=k).map(|i| format!("b{i}")).collect(),
    }
}

fn terms_to_json<K: Scalar>(p: &Poly<K>) -> Vec<TermJson> {
    p.terms()
        .map(|(e, c)| {
            let (re, im) = c.to_strings();
            TermJson {
                u: e.u.clone(),
                v: e.v.clone(),
                re: ScalarJson::Text(re),
                im: Box::new(ScalarJson::Text(im)),
            }
        })
        .collect()
}

fn terms_from_json<K: Scalar>(nvars: usize, terms: &[TermJson]) -> Result<Poly<K>> {
    let mut out = Vec::with_capacity(terms.len());
    for t in terms {
        let e = MonomialJson {
            u: t.u.clone(),
            v: t.v.clone(),
        }
        .to_pair(nvars)?;
        out.push((e, t.coeff()?));
    }
    Poly::from_terms(nvars, out)
}

impl PolyJson {
    pub fn from_poly<K: Scalar>(p: &Poly<K>) -> Self {
        PolyJson {
            nvars: p.nvars(),
            names: Some(p.names().to_vec()),
            blocks: p.blocks().iter().map(|b| b.vars.clone()).collect(),
            block_names: (!p.blocks().is_empty()).then(|| p.blocks().iter().map(|b| b.name.clone()).collect()),
            terms: terms_to_json(p),
        }
    }

    pub fn to_poly<K: Scalar>(&self) -> Result<Poly<K>> {
        let mut p = terms_from_json(self.nvars, &self.terms)?;
        if let Some(names) = &self.names {
            p = p.with_names(names.clone())?;
        }
        if !self.blocks.is_empty() {
            let bn = match &self.block_names {
                Some(n) if n.len() == self.blocks.len() => n.clone(),
                Some(n) => {
                    return Err(Error::Dimension(format!(
                        "{} block names for {} blocks",
                        n.len(),
                        self.blocks.len()
                    )))
                }
                None => default_block_names(self.blocks.len()),
            };
            let blocks = bn
                .into_iter()
                .zip(&self.blocks)
                .map(|(name, vars)| Block {
                    name,
                    vars: vars.clone(),
                })
                .collect();
            p = p.with_blocks(blocks)?;
        }
        Ok(p)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub entries: Vec<Vec<ScalarJson>>,
}

impl MatrixJson {
    pub fn from_matrix<K: Scalar>(m: &Matrix<K>) -> Self {
        MatrixJson {
            dim: m.rows(),
            entries: m.to_rows().iter().map(|r| r.iter().map(ScalarJson::from_scalar).collect()).collect(),
        }
    }

    pub fn to_matrix<K: Scalar>(&self) -> Result<Matrix<K>> {
        if self.entries.len() != self.dim || self.entries.iter().any(|r| r.len() != self.dim) {
            return Err(Error::Dimension(format!("entries are not {0}x{0}", self.dim)));
        }
        let rows = self
            .entries
            .iter()
            .map(|r| r.iter().map(|s| s.parse()).collect::<Result<Vec<K>>>())
            .collect::<Result<Vec<_>>>()?;
        Matrix::from_rows(rows)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MapJson {
    pub in_dim: usize,
    pub out_dim: usize,
    pub orientation: Orientation,
    #[serde(flatten)]
    pub choi: MatrixJson,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StateJson {
    pub dims: [usize; 2],
    #[serde(flatten)]
    pub matrix: MatrixJson,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CurveJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub names: Option<Vec<String>>,
    pub components: Vec<Vec<TermJson>>,
    #[serde(default)]
    pub denominator_index: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cleared: Option<Vec<usize>>,
    #[serde(default)]
    pub excluded: Vec<ScalarJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MomentJson {
    pub monomial: MonomialJson,
    pub value: ScalarJson,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum CertificateJson {
    Gram {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        names: Option<Vec<String>>,
        basis: Vec<MonomialJson>,
        #[serde(rename = "A")]
        a: Vec<Vec<ScalarJson>>,
        #[serde(rename = "B")]
        b: Vec<Vec<ScalarJson>>,
    },
    Moment {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        names: Option<Vec<String>>,
        basis: Vec<MonomialJson>,
        moments: Vec<MomentJson>,
        value_on_p: ScalarJson,
    },
}

/// A parsed certificate of either kind.
#[derive(Clone, Debug, PartialEq)]
pub enum Certificate<K> {
    Gram(GramCertificate<K>),
    Moment(MomentCertificate<K>),
}

fn rows_json<K: Scalar>(m: &Matrix<K>) -> Vec<Vec<ScalarJson>> {
    m.to_rows()
        .iter()
        .map(|r| r.iter().map(real_or_complex).collect())
        .collect()
}

/// Real values as bare strings, complex values as `{re, im}`.
fn real_or_complex<K: Scalar>(k: &K) -> ScalarJson {
    let (re, im) = k.to_strings();
    if K::parse(&im, "0").map(|z| z.is_zero()).unwrap_or(false) {
        ScalarJson::Text(re)
    } else {
        ScalarJson::from_scalar(k)
    }
}

fn rows_matrix<K: Scalar>(rows: &[Vec<ScalarJson>], n: usize) -> Result<Matrix<K>> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(Error::Dimension(format!("certificate block is not {n}x{n}")));
    }
    Matrix::from_rows(
        rows.iter()
            .map(|r| r.iter().map(|s| s.parse()).collect::<Result<Vec<K>>>())
            .collect::<Result<Vec<_>>>()?,
    )
}

fn basis_nvars(basis: &[MonomialJson]) -> Result<usize> {
    let n = basis.first().map(|m| m.u.len()).unwrap_or(0);
    basis.iter().map(|m| m.to_pair(n)).collect::<Result<Vec<_>>>()?;
    Ok(n)
}

/// Exact when every scalar string in `v` is an integer or `p/q`.
pub fn detect_regime(v: &Value) -> Regime {
    fn floaty(v: &Value) -> bool {
        match v {
            Value::String(s) => !is_exact_literal(s) && parse_f64(s).is_ok(),
            Value::Number(n) => !(n.is_i64() || n.is_u64()),
            Value::Array(a) => a.iter().any(floaty),
            Value::Object(o) => o.values().any(floaty),
            _ => false,
        }
    }
    if floaty(v) {
        Regime::Float
    } else {
        Regime::Exact
    }
}

pub fn poly_to_json<K: Scalar>(p: &HermitianPolynomial<K>) -> Value {
    serde_json::to_value(PolyJson::from_poly(p.poly())).expect("serializable")
}

pub fn poly_from_json<K: Scalar>(v: &Value) -> Result<HermitianPolynomial<K>> {
    let pj: PolyJson = serde_json::from_value(v.clone())?;
    HermitianPolynomial::new(pj.to_poly()?)
}

pub fn matrix_to_json<K: Scalar>(m: &Matrix<K>) -> Value {
    serde_json::to_value(MatrixJson::from_matrix(m)).expect("serializable")
}

pub fn matrix_from_json<K: Scalar>(v: &Value) -> Result<Matrix<K>> {
    let mj: MatrixJson = serde_json::from_value(v.clone())?;
    mj.to_matrix()
}

pub fn map_to_json<K: Scalar>(phi: &MatrixMap<K>, orientation: Orientation) -> Value {
    serde_json::to_value(MapJson {
        in_dim: phi.in_dim(),
        out_dim: phi.out_dim(),
        orientation,
        choi: MatrixJson::from_matrix(phi.choi().matrix()),
    })
    .expect("serializable")
}

pub fn map_from_json<K: Scalar>(v: &Value) -> Result<(MatrixMap<K>, Orientation)> {
    let mj: MapJson = serde_json::from_value(v.clone())?;
    let choi = HermitianMatrix::new(mj.choi.to_matrix()?)?;
    Ok((MatrixMap::new(mj.in_dim, mj.out_dim, choi)?, mj.orientation))
}

pub fn state_to_json<K: Scalar>(rho: &DensityMatrix<K>) -> Value {
    let (a, b) = rho.dims();
    serde_json::to_value(StateJson {
        dims: [a, b],
        matrix: MatrixJson::from_matrix(rho.matrix().matrix()),
    })
    .expect("serializable")
}

/// Reads a state; `dims` overrides the `"dims"` field when given.
pub fn state_from_json<K: Scalar>(v: &Value, dims: Option<(usize, usize)>) -> Result<DensityMatrix<K>> {
    let (m, file_dims) = match v.get("dims") {
        Some(_) => {
            let sj: StateJson = serde_json::from_value(v.clone())?;
            (sj.matrix.to_matrix()?, Some((sj.dims[0], sj.dims[1])))
        }
        None => (matrix_from_json(v)?, None),
    };
    let dims = dims
        .or(file_dims)
        .ok_or_else(|| Error::Invalid("state dims missing; pass them explicitly".into()))?;
    DensityMatrix::new(dims, HermitianMatrix::new(m)?)
}

pub fn curve_to_json(c: &ZeroCurve) -> Value {
    serde_json::to_value(CurveJson {
        names: Some(c.names.clone()),
        components: c.components.iter().map(terms_to_json).collect(),
        denominator_index: c.denominator_index,
        cleared: Some(c.cleared.clone()),
        excluded: c.excluded.iter().map(ScalarJson::from_scalar).collect(),
    })
    .expect("serializable")
}

/// Components are polynomials in `(α, ᾱ)`: one-variable term lists. Without
/// `"cleared"` every component is multiplied through by the denominator.
pub fn curve_from_json(v: &Value) -> Result<ZeroCurve> {
    let cj: CurveJson = serde_json::from_value(v.clone())?;
    let components = cj
        .components
        .iter()
        .map(|t| terms_from_json::<GaussRat>(1, t)?.with_names(vec!["alpha".into()]))
        .collect::<Result<Vec<_>>>()?;
    let k = components.len();
    let names = cj
        .names
        .unwrap_or_else(|| (1..=k).map(|i| format!("z{i}")).collect());
    let cleared = cj.cleared.unwrap_or_else(|| match cj.denominator_index {
        Some(_) => (0..k).collect(),
        None => Vec::new(),
    });
    let excluded = cj.excluded.iter().map(|s| s.parse()).collect::<Result<Vec<GaussRat>>>()?;
    ZeroCurve::new(names, components, cj.denominator_index, cleared, excluded)
}

pub fn gram_certificate_to_json<K: Scalar>(cert: &GramCertificate<K>, names: Option<&[String]>) -> Value {
    serde_json::to_value(CertificateJson::Gram {
        names: names.map(|n| n.to_vec()),
        basis: cert.basis.iter().map(MonomialJson::from_pair).collect(),
        a: rows_json(&cert.a),
        b: rows_json(&cert.b),
    })
    .expect("serializable")
}

pub fn moment_certificate_to_json<K: Scalar>(cert: &MomentCertificate<K>, names: Option<&[String]>) -> Value {
    serde_json::to_value(CertificateJson::Moment {
        names: names.map(|n| n.to_vec()),
        basis: cert.basis.monomials().iter().map(MonomialJson::from_pair).collect(),
        moments: cert
            .moments
            .iter()
            .map(|(e, v)| MomentJson {
                monomial: MonomialJson::from_pair(e),
                value: real_or_complex(v),
            })
            .collect(),
        value_on_p: real_or_complex(&cert.value_on_p),
    })
    .expect("serializable")
}

pub fn certificate_to_json<K: Scalar>(cert: &Certificate<K>, names: Option<&[String]>) -> Value {
    match cert {
        Certificate::Gram(g) => gram_certificate_to_json(g, names),
        Certificate::Moment(m) => moment_certificate_to_json(m, names),
    }
}

pub fn certificate_from_json<K: Scalar>(v: &Value) -> Result<Certificate<K>> {
    match serde_json::from_value::<CertificateJson>(v.clone())? {
        CertificateJson::Gram { basis, a, b, .. } => {
            let n = basis_nvars(&basis)?;
            let h = basis.len();
            Ok(Certificate::Gram(GramCertificate {
                basis: basis.iter().map(|m| m.to_pair(n)).collect::<Result<_>>()?,
                a: rows_matrix(&a, h)?,
                b: rows_matrix(&b, h)?,
            }))
        }
        CertificateJson::Moment {
            basis,
            moments,
            value_on_p,
            ..
        } => {
            let n = basis_nvars(&basis)?;
            let basis = GramBasis::new(n, basis.iter().map(|m| m.to_pair(n)).collect::<Result<_>>()?)?;
            let mut map = BTreeMap::new();
            for m in &moments {
                map.insert(m.monomial.to_pair(n)?, m.value.parse()?);
            }
            Ok(Certificate::Moment(MomentCertificate {
                basis,
                moments: map,
                value_on_p: value_on_p.parse()?,
            }))
        }
    }
}

pub fn monomials_to_json(names: &[String], monomials: &[ExponentPair]) -> Value {
    json!({
        "names": names,
        "monomials": monomials.iter().map(MonomialJson::from_pair).collect::<Vec<_>>(),
        "display": monomials.iter().map(|m| m.display(names)).collect::<Vec<_>>(),
    })
}

/// Reads `{"monomials": [...]}` or a bare list of `{u, v}` pairs.
pub fn monomials_from_json(v: &Value) -> Result<Vec<ExponentPair>> {
    let list = v.get("monomials").unwrap_or(v);
    let ms: Vec<MonomialJson> = serde_json::from_value(list.clone())?;
    let n = basis_nvars(&ms)?;
    ms.iter().map(|m| m.to_pair(n)).collect()
}

pub fn proof_report_to_json(report: &ProofReport) -> Value {
    let names = &report.system.names;
    let c = &report.contradiction;
    json!({
        "verdict": "not-sos",
        "curve_vanishes": report.curve_vanishes,
        "curve_clearing_power": report.curve_clearing_power,
        "basis": report.system.basis.monomials().iter().map(|m| m.display(names)).collect::<Vec<_>>(),
        "clearing_power": report.system.clearing_power,
        "rows": report.system.row_strings(),
        "kernel_dim": report.system.kernel.len(),
        "forced_zero": report.forced.iter().map(|m| m.display(names)).collect::<Vec<_>>(),
        "contradiction": {
            "monomial": c.monomial.display(names),
            "diagonal": c.diagonal.display(names),
            "coefficient": real_or_complex(&c.coefficient),
            "pairs": c.pairs.iter().map(|(a, b)| [a.display(names), b.display(names)]).collect::<Vec<_>>(),
        },
        "summary": report.summary(),
    })
}

pub fn fixture_to_json(f: &Fixture) -> Value {
    match f {
        Fixture::Polynomial(p) => poly_to_json(p),
        Fixture::Map(m) => map_to_json(m, Orientation::OutputFirst),
        Fixture::Curve(c) => curve_to_json(c),
        Fixture::Matrix(m) => matrix_to_json(m),
        Fixture::Monomials { names, monomials } => monomials_to_json(names, monomials),
        Fixture::Certificate { names, cert } => gram_certificate_to_json(cert, Some(names)),
        Fixture::State(s) => {
            let rho = DensityMatrix::new((2, 2), s.clone()).expect("Bell state is a state");
            state_to_json(&rho)
        }
    }
}
