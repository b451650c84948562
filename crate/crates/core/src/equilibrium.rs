//! Nash/Pareto scan of the prisoner's dilemma strategy square.
//!
//! At each grid point `(x, y) = (|α|², |λ|²)` the four outcome cells carry
//! weighted payoffs `table[r][c] * w[r][c]`. Two notions are computed side by
//! side:
//!
//! * cell-wise: Nash and Pareto flags of each cell of that weighted 2×2 table;
//! * continuous: best responses in `x` and `y` of the expected payoffs, whose
//!   mutual best responses are the equilibria of the continuous game.

use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_unit_interval, Error, Result};
use crate::fock::Polarization;
use crate::format::fmt12;
use crate::game::{idx, pd_cell_weights, pd_expected, Choice, PayoffTable};

/// Payoff differences within this (scaled) margin count as ties.
pub const TIE_TOL: f64 = 1e-12;

/// Published square regions on which Nash and Pareto coincide.
pub const PUBLISHED_REGIONS: [[f64; 2]; 2] = [[0.0, 0.443443], [0.600600, 1.0]];

/// A payoff cell `(alice's label, bob's label)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Cell(pub Choice, pub Choice);

impl Cell {
    pub const ALL: [Cell; 4] = [
        Cell(Polarization::H, Polarization::H),
        Cell(Polarization::H, Polarization::V),
        Cell(Polarization::V, Polarization::H),
        Cell(Polarization::V, Polarization::V),
    ];

    pub fn label(self) -> String {
        format!("{}{}", self.0.letter(), self.1.letter())
    }

    pub fn parse(s: &str) -> Result<Cell> {
        Cell::ALL
            .into_iter()
            .find(|c| c.label().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Invalid(format!("unknown cell `{s}`, expected HH, HV, VH or VV")))
    }
}

/// Weighted outcome table at one grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellTable {
    pub entries: [[(f64, f64); 2]; 2],
}

impl CellTable {
    pub fn new(x: f64, y: f64, table: &PayoffTable) -> Self {
        let w = pd_cell_weights(x, y);
        let mut entries = [[(0.0, 0.0); 2]; 2];
        for r in 0..2 {
            for c in 0..2 {
                let (a, b) = table.entries[r][c];
                entries[r][c] = (a * w[r][c], b * w[r][c]);
            }
        }
        Self { entries }
    }

    pub fn get(&self, cell: Cell) -> (f64, f64) {
        self.entries[idx(cell.0)][idx(cell.1)]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Cmp {
    Less,
    Tie,
    Greater,
}

fn compare(a: f64, b: f64) -> Cmp {
    let scale = 1f64.max(a.abs()).max(b.abs());
    if (a - b).abs() <= TIE_TOL * scale {
        Cmp::Tie
    } else if a > b {
        Cmp::Greater
    } else {
        Cmp::Less
    }
}

/// Continuous best response of one player, from the corners of the
/// (linear in own strategy) expected payoff.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BestResponse {
    Pure(f64),
    Indifferent,
}

impl BestResponse {
    pub fn contains(self, v: f64) -> bool {
        match self {
            BestResponse::Pure(b) => b == v,
            BestResponse::Indifferent => true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointClassification {
    pub x: f64,
    pub y: f64,
    pub nash: [[bool; 2]; 2],
    pub pareto: [[bool; 2]; 2],
    pub best_response_a: BestResponse,
    pub best_response_b: BestResponse,
    /// `x` or `y` on the boundary, where some cells carry zero payoff.
    pub degenerate: bool,
}

impl PointClassification {
    pub fn is_nash(&self, cell: Cell) -> bool {
        self.nash[idx(cell.0)][idx(cell.1)]
    }

    pub fn is_pareto(&self, cell: Cell) -> bool {
        self.pareto[idx(cell.0)][idx(cell.1)]
    }

    /// `(x, y)` is a mutual best response of the continuous game.
    pub fn is_continuous_equilibrium(&self) -> bool {
        self.best_response_a.contains(self.x) && self.best_response_b.contains(self.y)
    }
}

fn best_response(low: f64, high: f64) -> BestResponse {
    match compare(high, low) {
        Cmp::Greater => BestResponse::Pure(1.0),
        Cmp::Less => BestResponse::Pure(0.0),
        Cmp::Tie => BestResponse::Indifferent,
    }
}

/// Classifies every cell at `(x, y)`. With `strict`, a Nash cell must beat
/// every unilateral deviation; otherwise ties are allowed.
pub fn classify_point(x: f64, y: f64, table: &PayoffTable, strict: bool) -> Result<PointClassification> {
    check_unit_interval("x", x)?;
    check_unit_interval("y", y)?;
    let t = CellTable::new(x, y, table);
    let e = &t.entries;
    let mut nash = [[false; 2]; 2];
    let mut pareto = [[false; 2]; 2];
    let holds = |c: Cmp| if strict { c == Cmp::Greater } else { c != Cmp::Less };
    for r in 0..2 {
        for c in 0..2 {
            let (a, b) = e[r][c];
            let row_ok = holds(compare(a, e[1 - r][c].0));
            let col_ok = holds(compare(b, e[r][1 - c].1));
            nash[r][c] = row_ok && col_ok;

            let dominated = (0..2).flat_map(|r2| (0..2).map(move |c2| (r2, c2))).any(|(r2, c2)| {
                if (r2, c2) == (r, c) {
                    return false;
                }
                let (a2, b2) = e[r2][c2];
                let (ca, cb) = (compare(a2, a), compare(b2, b));
                ca != Cmp::Less && cb != Cmp::Less && (ca == Cmp::Greater || cb == Cmp::Greater)
            });
            pareto[r][c] = !dominated;
        }
    }
    let (a0, _) = pd_expected(0.0, y, table)?;
    let (a1, _) = pd_expected(1.0, y, table)?;
    let (_, b0) = pd_expected(x, 0.0, table)?;
    let (_, b1) = pd_expected(x, 1.0, table)?;
    Ok(PointClassification {
        x,
        y,
        nash,
        pareto,
        best_response_a: best_response(a0, a1),
        best_response_b: best_response(b0, b1),
        degenerate: x == 0.0 || x == 1.0 || y == 0.0 || y == 1.0,
    })
}

/// Grid value `i / (n - 1)`.
pub fn grid_value(i: usize, n: usize) -> f64 {
    i as f64 / (n - 1) as f64
}

/// Classification of an `n × n` grid, row-major with `x` as the row index.
#[derive(Debug, Clone, PartialEq)]
pub struct GridClassification {
    pub n: usize,
    pub strict: bool,
    pub points: Vec<PointClassification>,
}

impl GridClassification {
    pub fn point(&self, i: usize, j: usize) -> &PointClassification {
        &self.points[i * self.n + j]
    }

    pub fn step(&self) -> f64 {
        1.0 / (self.n - 1) as f64
    }

    /// Writes `x,y,cell,nash,pareto,degenerate`, one row per point and cell.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "x,y,cell,nash,pareto,degenerate")?;
        for p in &self.points {
            let (x, y) = (fmt12(p.x), fmt12(p.y));
            for cell in Cell::ALL {
                writeln!(
                    out,
                    "{x},{y},{},{},{},{}",
                    cell.label(),
                    p.is_nash(cell),
                    p.is_pareto(cell),
                    p.degenerate
                )?;
            }
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("ascii")
    }

    /// Static heatmap: one unit square per grid point, filled where `pred`
    /// holds. `x` runs right, `y` runs up.
    pub fn write_svg<W: Write, F>(&self, out: &mut W, title: &str, pred: F) -> io::Result<()>
    where
        F: Fn(&PointClassification) -> bool,
    {
        let n = self.n;
        let px = (800 / n).max(1) * n;
        writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{px}" height="{px}" viewBox="0 0 {n} {n}" shape-rendering="crispEdges">"#
        )?;
        writeln!(out, "<title>{title}</title>")?;
        writeln!(out, r##"<rect x="0" y="0" width="{n}" height="{n}" fill="#f4f4f4"/>"##)?;
        for j in 0..n {
            let row = n - 1 - j;
            let mut i = 0;
            while i < n {
                if !pred(self.point(i, j)) {
                    i += 1;
                    continue;
                }
                let start = i;
                while i < n && pred(self.point(i, j)) {
                    i += 1;
                }
                writeln!(
                    out,
                    r##"<rect x="{start}" y="{row}" width="{}" height="1" fill="#2b6cb0"/>"##,
                    i - start
                )?;
            }
        }
        writeln!(out, "</svg>")
    }
}

/// Classifies all `n²` grid points, rows in parallel.
pub fn scan(n: usize, table: &PayoffTable, strict: bool) -> Result<GridClassification> {
    if n < 2 {
        return Err(Error::Invalid(format!("grid size must be at least 2, got {n}")));
    }
    table.validate()?;
    let rows: Result<Vec<Vec<PointClassification>>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .map(|j| classify_point(grid_value(i, n), grid_value(j, n), table, strict))
                .collect()
        })
        .collect();
    Ok(GridClassification {
        n,
        strict,
        points: rows?.into_iter().flatten().collect(),
    })
}

/// Maximal index ranges `[lo, hi]` such that `pred` holds on every point of
/// the square `[lo, hi]²`.
pub fn extract_square_indices<F>(g: &GridClassification, pred: F) -> Vec<[usize; 2]>
where
    F: Fn(&PointClassification) -> bool,
{
    let n = g.n;
    // prefix[i][j] = number of true points in [0, i) × [0, j)
    let mut prefix = vec![0u32; (n + 1) * (n + 1)];
    for i in 0..n {
        let mut row = 0;
        for j in 0..n {
            row += pred(g.point(i, j)) as u32;
            prefix[(i + 1) * (n + 1) + j + 1] = prefix[i * (n + 1) + j + 1] + row;
        }
    }
    let full = |lo: usize, hi: usize| {
        let at = |i: usize, j: usize| prefix[i * (n + 1) + j] as i64;
        let count = at(hi + 1, hi + 1) - at(lo, hi + 1) - at(hi + 1, lo) + at(lo, lo);
        count == ((hi - lo + 1) * (hi - lo + 1)) as i64
    };
    let mut out = Vec::new();
    let mut prev_hi: Option<usize> = None;
    for lo in 0..n {
        if !full(lo, lo) {
            prev_hi = None;
            continue;
        }
        // a valid square at lo - 1 reaching hi also covers [lo, hi]²
        let mut hi = prev_hi.map_or(lo, |h| h.max(lo));
        while hi + 1 < n && full(lo, hi + 1) {
            hi += 1;
        }
        if prev_hi != Some(hi) {
            out.push([lo, hi]);
        }
        prev_hi = Some(hi);
    }
    out
}

/// [`extract_square_indices`] in grid values.
pub fn extract_square_regions<F>(g: &GridClassification, pred: F) -> Vec<[f64; 2]>
where
    F: Fn(&PointClassification) -> bool,
{
    extract_square_indices(g, pred)
        .into_iter()
        .map(|[lo, hi]| [grid_value(lo, g.n), grid_value(hi, g.n)])
        .collect()
}

/// Cell-wise predicate "cell is Nash and/or Pareto".
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellPredicate {
    pub cell: Cell,
    pub nash: bool,
    pub pareto: bool,
}

impl CellPredicate {
    pub fn nash_and_pareto(cell: Cell) -> Self {
        Self {
            cell,
            nash: true,
            pareto: true,
        }
    }

    pub fn holds(&self, p: &PointClassification) -> bool {
        (!self.nash || p.is_nash(self.cell)) && (!self.pareto || p.is_pareto(self.cell))
    }

    pub fn describe(&self) -> String {
        let props: Vec<&str> = [(self.nash, "nash"), (self.pareto, "pareto")]
            .into_iter()
            .filter_map(|(on, s)| on.then_some(s))
            .collect();
        format!("{} {}", self.cell.label(), props.join("+"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionReport {
    pub notion: String,
    pub predicate: String,
    pub intervals: Vec<[f64; 2]>,
    /// Published reference squares, reproduced for side-by-side comparison.
    pub published: Vec<[f64; 2]>,
    /// Per interval: matches some reference square within one grid step.
    pub agreement: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuousReport {
    pub notion: String,
    /// Number of grid points that are mutual best responses.
    pub count: usize,
    /// Up to the first 1000 such points, row-major.
    pub equilibria: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub n: usize,
    pub strict: bool,
    pub regions: Vec<RegionReport>,
    pub continuous: ContinuousReport,
}

impl ScanReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports always serialize");
        s.push('\n');
        s
    }
}

/// `[lo, hi]` matches a reference square within `tol` at both ends.
pub fn interval_agrees(interval: [f64; 2], claims: &[[f64; 2]], tol: f64) -> bool {
    claims
        .iter()
        .any(|c| (interval[0] - c[0]).abs() <= tol && (interval[1] - c[1]).abs() <= tol)
}

pub fn region_report(g: &GridClassification, predicate: CellPredicate) -> RegionReport {
    let intervals = extract_square_regions(g, |p| predicate.holds(p));
    let claims = PUBLISHED_REGIONS.to_vec();
    // float slack so an exact one-step difference still counts
    let tol = g.step() * (1.0 + 1e-9);
    let agreement = intervals.iter().map(|&iv| interval_agrees(iv, &claims, tol)).collect();
    RegionReport {
        notion: "cellwise".to_string(),
        predicate: predicate.describe(),
        intervals,
        published: claims,
        agreement,
    }
}

pub fn continuous_report(g: &GridClassification) -> ContinuousReport {
    let all: Vec<[f64; 2]> = g
        .points
        .iter()
        .filter(|p| p.is_continuous_equilibrium())
        .map(|p| [p.x, p.y])
        .collect();
    ContinuousReport {
        notion: "continuous-best-response".to_string(),
        count: all.len(),
        equilibria: all.into_iter().take(1000).collect(),
    }
}

/// Region report for the two candidate cells: mutual defection (`VV`)
/// near the origin and mutual cooperation (`HH`) near `(1, 1)`.
pub fn scan_report(g: &GridClassification) -> ScanReport {
    use Polarization::*;
    ScanReport {
        n: g.n,
        strict: g.strict,
        regions: vec![
            region_report(g, CellPredicate::nash_and_pareto(Cell(V, V))),
            region_report(g, CellPredicate::nash_and_pareto(Cell(H, H))),
        ],
        continuous: continuous_report(g),
    }
}
