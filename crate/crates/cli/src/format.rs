//! Versioned JSON and text formats. Complex numbers are `[re, im]`, matrices
//! are arrays of rows, generator indices in relation files are 1-based.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use tannaka::algebra::{AlgebraElement, GeneratorTable, Monomial};
use tannaka::closure::{Collection, OpSpace};
use tannaka::hopf::Relation;
use tannaka::scalar::{c, ipow, C};
use tannaka::verify::{CheckRecord, VerificationReport};
use tannaka::word::Word;
use tannaka::InterOp64;

use crate::error::{CliError, CliResult};

pub const FORMAT: u32 = 1;

pub type ComplexJson = [f64; 2];
pub type MatrixJson = Vec<Vec<ComplexJson>>;

pub fn complex_to_json(z: C<f64>) -> ComplexJson {
    [z.re, z.im]
}

pub fn complex_from_json(z: ComplexJson) -> C<f64> {
    c(z[0], z[1])
}

pub fn matrix_to_json(m: &DMatrix<C<f64>>) -> MatrixJson {
    m.row_iter()
        .map(|row| row.iter().map(|z| complex_to_json(*z)).collect())
        .collect()
}

/// Checks the row count and every row length, naming the first bad row.
pub fn matrix_from_json(
    rows: &MatrixJson,
    expected_rows: usize,
    expected_cols: usize,
    context: &str,
) -> CliResult<DMatrix<C<f64>>> {
    if rows.len() != expected_rows {
        return Err(CliError::input(format!(
            "{context}: {} rows, expected {expected_rows}",
            rows.len()
        )));
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != expected_cols {
            return Err(CliError::input(format!(
                "{context}: row {i} has {} entries, expected {expected_cols}",
                row.len()
            )));
        }
        if let Some(j) = row
            .iter()
            .position(|z| !z[0].is_finite() || !z[1].is_finite())
        {
            return Err(CliError::input(format!(
                "{context}: row {i} entry {j} is not finite"
            )));
        }
    }
    Ok(DMatrix::from_fn(expected_rows, expected_cols, |i, j| {
        complex_from_json(rows[i][j])
    }))
}

/// A square matrix whose size is taken from its first row count.
pub fn square_from_json(rows: &MatrixJson, context: &str) -> CliResult<DMatrix<C<f64>>> {
    if rows.is_empty() {
        return Err(CliError::input(format!("{context}: empty matrix")));
    }
    matrix_from_json(rows, rows.len(), rows.len(), context)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorJson {
    pub dim: usize,
    pub source_power: usize,
    pub target_power: usize,
    pub matrix: MatrixJson,
}

impl OperatorJson {
    pub fn from_op(op: &InterOp64) -> Self {
        Self {
            dim: op.dim(),
            source_power: op.source(),
            target_power: op.target(),
            matrix: matrix_to_json(op.matrix()),
        }
    }

    pub fn to_op(&self, context: &str) -> CliResult<InterOp64> {
        if self.dim == 0 {
            return Err(CliError::input(format!("{context}: dim must be positive")));
        }
        let rows = ipow(self.dim, self.target_power);
        let cols = ipow(self.dim, self.source_power);
        let m = matrix_from_json(&self.matrix, rows, cols, context)?;
        Ok(InterOp64::new(
            self.dim,
            self.source_power,
            self.target_power,
            m,
        )?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorFile {
    pub format: u32,
    #[serde(flatten)]
    pub operator: OperatorJson,
}

/// A bare matrix, used for `F` and `Q`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub format: u32,
    pub matrix: MatrixJson,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorFile {
    pub format: u32,
    pub dim: usize,
    #[serde(rename = "R")]
    pub r: OperatorJson,
    pub generators: Vec<OperatorJson>,
    #[serde(rename = "F", default, skip_serializing_if = "Option::is_none")]
    pub f: Option<MatrixJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sign: Option<i32>,
}

impl GeneratorFile {
    pub fn operators(&self) -> CliResult<(InterOp64, Vec<InterOp64>)> {
        let r = self.r.to_op("R")?;
        check_dim(self.dim, r.dim(), "R")?;
        let gens = self
            .generators
            .iter()
            .enumerate()
            .map(|(i, g)| {
                let ctx = format!("generators[{i}]");
                let op = g.to_op(&ctx)?;
                check_dim(self.dim, op.dim(), &ctx)?;
                Ok(op)
            })
            .collect::<CliResult<Vec<_>>>()?;
        Ok((r, gens))
    }
}

fn check_dim(expected: usize, got: usize, context: &str) -> CliResult<()> {
    if expected == got {
        Ok(())
    } else {
        Err(CliError::input(format!(
            "{context}: dim {got} does not match file dim {expected}"
        )))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellJson {
    pub k: usize,
    pub l: usize,
    pub basis: Vec<OperatorJson>,
    /// S-expression words; `null` where no word is known.
    pub provenance: Vec<Option<String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CollectionFile {
    pub format: u32,
    pub dim: usize,
    pub level: usize,
    pub tolerance: f64,
    #[serde(rename = "R")]
    pub r: OperatorJson,
    pub generators: Vec<OperatorJson>,
    pub cells: Vec<CellJson>,
}

impl CollectionFile {
    pub fn from_collection(c: &Collection<f64>) -> Self {
        let cells = c
            .spaces()
            .map(|s| {
                let (k, l) = s.grading();
                CellJson {
                    k,
                    l,
                    basis: s.basis().iter().map(OperatorJson::from_op).collect(),
                    provenance: s
                        .provenance()
                        .iter()
                        .map(|w| w.as_ref().map(ToString::to_string))
                        .collect(),
                }
            })
            .collect();
        Self {
            format: FORMAT,
            dim: c.dim(),
            level: c.level(),
            tolerance: c.tolerance(),
            r: OperatorJson::from_op(c.r()),
            generators: c.generators().iter().map(OperatorJson::from_op).collect(),
            cells,
        }
    }

    pub fn to_collection(&self) -> CliResult<Collection<f64>> {
        if !self.tolerance.is_finite() || self.tolerance <= 0.0 {
            return Err(CliError::input("tolerance must be positive"));
        }
        let gens = GeneratorFile {
            format: FORMAT,
            dim: self.dim,
            r: self.r.clone(),
            generators: self.generators.clone(),
            f: None,
            sign: None,
        };
        let (r, generators) = gens.operators()?;
        let mut spaces = Vec::with_capacity(self.cells.len());
        for cell in &self.cells {
            let ctx = format!("cell ({},{})", cell.k, cell.l);
            let basis = cell
                .basis
                .iter()
                .enumerate()
                .map(|(i, op)| op.to_op(&format!("{ctx} basis[{i}]")))
                .collect::<CliResult<Vec<_>>>()?;
            if cell.provenance.len() != basis.len() {
                return Err(CliError::input(format!(
                    "{ctx}: provenance length differs from basis length"
                )));
            }
            let provenance = cell
                .provenance
                .iter()
                .enumerate()
                .map(|(i, w)| {
                    w.as_deref()
                        .map(Word::parse)
                        .transpose()
                        .map_err(|e| CliError::input(format!("{ctx} provenance[{i}]: {e}")))
                })
                .collect::<CliResult<Vec<_>>>()?;
            let space = OpSpace::from_parts(self.dim, (cell.k, cell.l), basis, provenance)
                .map_err(|e| CliError::input(format!("{ctx}: {e}")))?;
            spaces.push(space);
        }
        Collection::from_spaces(self.dim, self.level, r, generators, spaces, self.tolerance)
            .map_err(|e| CliError::input(e.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub coeff: ComplexJson,
    pub degree: usize,
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelationJson {
    pub terms: Vec<TermJson>,
    pub equals: ComplexJson,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableEntryJson {
    pub i: usize,
    pub j: usize,
    pub image: Vec<TermJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelationsFile {
    pub format: u32,
    pub dim: usize,
    pub relations: Vec<RelationJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub involution: Option<Vec<TableEntryJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub antipode: Option<Vec<TableEntryJson>>,
}

pub fn terms_to_json(a: &AlgebraElement<f64>) -> Vec<TermJson> {
    a.terms()
        .iter()
        .map(|(m, z)| TermJson {
            coeff: complex_to_json(*z),
            degree: m.degree(),
            rows: m.rows().iter().map(|i| i + 1).collect(),
            cols: m.cols().iter().map(|j| j + 1).collect(),
        })
        .collect()
}

pub fn terms_from_json(
    dim: usize,
    terms: &[TermJson],
    context: &str,
) -> CliResult<AlgebraElement<f64>> {
    let mut a = AlgebraElement::zero(dim);
    for (t, term) in terms.iter().enumerate() {
        let bad = |what: &str| CliError::input(format!("{context} term {t}: {what}"));
        if term.rows.len() != term.degree || term.cols.len() != term.degree {
            return Err(bad("rows/cols length differs from degree"));
        }
        if term
            .rows
            .iter()
            .chain(&term.cols)
            .any(|&i| i == 0 || i > dim)
        {
            return Err(bad("index outside 1..=dim"));
        }
        let m = Monomial::new(
            term.rows.iter().map(|i| i - 1).collect(),
            term.cols.iter().map(|j| j - 1).collect(),
        )?;
        a.add_term(m, complex_from_json(term.coeff));
    }
    Ok(a)
}

fn table_to_json(t: &GeneratorTable<f64>) -> Vec<TableEntryJson> {
    let d = t.dim();
    (0..d)
        .flat_map(|i| (0..d).map(move |j| (i, j)))
        .map(|(i, j)| TableEntryJson {
            i: i + 1,
            j: j + 1,
            image: terms_to_json(t.image(i, j)),
        })
        .collect()
}

impl RelationsFile {
    pub fn from_relations(
        dim: usize,
        relations: &[Relation<f64>],
        involution: Option<&GeneratorTable<f64>>,
        antipode: Option<&GeneratorTable<f64>>,
    ) -> Self {
        Self {
            format: FORMAT,
            dim,
            relations: relations
                .iter()
                .map(|r| RelationJson {
                    terms: terms_to_json(&r.lhs),
                    equals: complex_to_json(r.equals),
                })
                .collect(),
            involution: involution.map(table_to_json),
            antipode: antipode.map(table_to_json),
        }
    }

    pub fn to_relations(&self) -> CliResult<Vec<Relation<f64>>> {
        self.relations
            .iter()
            .enumerate()
            .map(|(i, r)| {
                Ok(Relation {
                    lhs: terms_from_json(self.dim, &r.terms, &format!("relations[{i}]"))?,
                    equals: complex_from_json(r.equals),
                })
            })
            .collect()
    }
}

/// `k\l` header row, then one row per source power.
pub fn dims_csv(table: &[Vec<usize>]) -> String {
    let mut out = String::from("k\\l");
    for l in 0..table.len() {
        let _ = write!(out, ",{l}");
    }
    out.push('\n');
    for (k, row) in table.iter().enumerate() {
        let _ = write!(out, "{k}");
        for v in row {
            let _ = write!(out, ",{v}");
        }
        out.push('\n');
    }
    out
}

pub fn parse_dims_csv(text: &str) -> CliResult<Vec<Vec<usize>>> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| CliError::input("dims csv: empty"))?;
    let width = header.split(',').count().saturating_sub(1);
    lines
        .enumerate()
        .map(|(k, line)| {
            let cells: Vec<&str> = line.split(',').collect();
            if cells.len() != width + 1 {
                return Err(CliError::input(format!(
                    "dims csv: row {k} has {} cells, expected {}",
                    cells.len(),
                    width + 1
                )));
            }
            cells[1..]
                .iter()
                .map(|s| {
                    s.trim()
                        .parse()
                        .map_err(|_| CliError::input(format!("dims csv: row {k}: bad entry {s:?}")))
                })
                .collect()
        })
        .collect()
}

pub fn reports_text(reports: &[VerificationReport]) -> String {
    reports.iter().map(ToString::to_string).collect()
}

/// Check records from report text; comment lines are skipped.
pub fn parse_report_records(text: &str) -> CliResult<Vec<CheckRecord>> {
    text.lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .enumerate()
        .map(|(i, line)| {
            let parts: Vec<&str> = line.split_whitespace().collect();
            let bad = || CliError::input(format!("report line {i}: {line:?}"));
            if parts.len() != 4 {
                return Err(bad());
            }
            let pass = match parts[3] {
                "PASS" => true,
                "FAIL" => false,
                _ => return Err(bad()),
            };
            Ok(CheckRecord {
                name: parts[0].to_string(),
                residual: parts[1].parse().map_err(|_| bad())?,
                threshold: parts[2].parse().map_err(|_| bad())?,
                pass,
            })
        })
        .collect()
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string(value).expect("plain data serializes");
    s.push('\n');
    s
}

/// Reads a versioned JSON file.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let raw: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    match raw.get("format").and_then(serde_json::Value::as_u64) {
        Some(v) if v == u64::from(FORMAT) => {}
        Some(v) => {
            return Err(CliError::input(format!(
                "{}: unsupported format {v}",
                path.display()
            )))
        }
        None => {
            return Err(CliError::input(format!(
                "{}: missing \"format\" field",
                path.display()
            )))
        }
    }
    serde_json::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}
