use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde_json::{json, Value};

use super::rank::SparseCol;
use super::IhError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    pub label: String,
    /// Least `j` with the cell contained in `X_j`.
    pub level: usize,
    pub on_boundary: bool,
}

/// A finite regular cell complex of dimension `m` with a filtration by
/// subcomplexes `X_0 ⊂ … ⊂ X_m`.
#[derive(Clone, Debug, PartialEq)]
pub struct FilteredComplex {
    m: usize,
    cells: Vec<Vec<Cell>>,
    /// `boundary[d][j]` lists `(face index, coefficient)` for the `j`-th
    /// `d`-cell; zero coefficients record incidence only.
    boundary: Vec<Vec<SparseCol>>,
    has_boundary: bool,
}

impl FilteredComplex {
    pub fn new(m: usize, cells: Vec<Vec<Cell>>, boundary: Vec<Vec<SparseCol>>, has_boundary: bool) -> Result<Self, IhError> {
        let k = FilteredComplex { m, cells, boundary, has_boundary };
        k.validate()?;
        Ok(k)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn cells(&self, d: usize) -> &[Cell] {
        self.cells.get(d).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn count(&self, d: usize) -> usize {
        self.cells(d).len()
    }

    pub fn total_cells(&self) -> usize {
        self.cells.iter().map(|c| c.len()).sum()
    }

    /// Columns of `∂_d : C_d → C_{d−1}`; empty for `d = 0` or `d > m`.
    pub fn boundary(&self, d: usize) -> &[SparseCol] {
        if d == 0 {
            return &[];
        }
        self.boundary.get(d).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn has_boundary(&self) -> bool {
        self.has_boundary
    }

    pub fn euler_characteristic(&self) -> i64 {
        (0..=self.m).map(|d| if d % 2 == 0 { self.count(d) as i64 } else { -(self.count(d) as i64) }).sum()
    }

    fn validate(&self) -> Result<(), IhError> {
        if self.cells.len() != self.m + 1 || self.boundary.len() != self.m + 1 {
            return Err(IhError::Malformed(format!("expected {} dimensions of cells and boundaries", self.m + 1)));
        }
        for d in 0..=self.m {
            if self.boundary[d].len() != self.count(d) {
                return Err(IhError::Malformed(format!("boundary of dimension {d} has wrong column count")));
            }
            for (j, col) in self.boundary[d].iter().enumerate() {
                if d == 0 && !col.is_empty() {
                    return Err(IhError::Malformed("vertices have no faces".into()));
                }
                for &(r, _) in col {
                    if d == 0 || r >= self.count(d - 1) {
                        return Err(IhError::Malformed(format!("face index {r} out of range")));
                    }
                    let (cell, face) = (&self.cells[d][j], &self.cells[d - 1][r]);
                    if face.level > cell.level {
                        return Err(IhError::Filtration(format!("face {} of {} has a higher level", face.label, cell.label)));
                    }
                    if cell.on_boundary && !face.on_boundary {
                        return Err(IhError::Malformed(format!("boundary subcomplex is not closed at {}", cell.label)));
                    }
                }
            }
            for c in &self.cells[d] {
                if c.level < d || c.level > self.m {
                    return Err(IhError::Filtration(format!("cell {} of dimension {d} has level {}", c.label, c.level)));
                }
            }
        }
        for d in 2..=self.m {
            if !compose_is_zero(&self.boundary[d - 1], &self.boundary[d]) {
                return Err(IhError::NotAComplex(d));
            }
        }
        Ok(())
    }

    /// Same cells with different levels; the closure and dimension
    /// conditions are checked.
    pub fn with_levels(&self, levels: &[Vec<usize>]) -> Result<Self, IhError> {
        let mut k = self.clone();
        for (d, lv) in levels.iter().enumerate() {
            if lv.len() != self.count(d) {
                return Err(IhError::Filtration(format!("level list for dimension {d} has the wrong length")));
            }
            for (c, &l) in k.cells[d].iter_mut().zip(lv) {
                c.level = l;
            }
        }
        k.validate()?;
        Ok(k)
    }

    pub fn levels(&self) -> Vec<Vec<usize>> {
        self.cells.iter().map(|cs| cs.iter().map(|c| c.level).collect()).collect()
    }

    /// For every cell, `best[j]` = the largest dimension of a face (the cell
    /// included) at level `≤ j`, or `-1` if there is none.
    pub fn face_level_dims(&self) -> Vec<Vec<Vec<i64>>> {
        let mut out: Vec<Vec<Vec<i64>>> = Vec::with_capacity(self.m + 1);
        for d in 0..=self.m {
            let mut layer = Vec::with_capacity(self.count(d));
            for (j, c) in self.cells[d].iter().enumerate() {
                let mut best = vec![-1i64; self.m + 1];
                for &(r, _) in self.boundary(d).get(j).map(|v| v.as_slice()).unwrap_or(&[]) {
                    for (b, f) in best.iter_mut().zip(&out[d - 1][r]) {
                        *b = (*b).max(*f);
                    }
                }
                for b in best.iter_mut().skip(c.level) {
                    *b = d as i64;
                }
                layer.push(best);
            }
            out.push(layer);
        }
        out
    }

    /// All faces (transitively) of every cell, as `(dim, index)` pairs.
    fn face_sets(&self) -> Vec<Vec<BTreeSet<(usize, usize)>>> {
        let mut out: Vec<Vec<BTreeSet<(usize, usize)>>> = Vec::new();
        for d in 0..=self.m {
            let mut layer = Vec::new();
            for j in 0..self.count(d) {
                let mut s = BTreeSet::new();
                for &(r, _) in self.boundary(d).get(j).map(|v| v.as_slice()).unwrap_or(&[]) {
                    s.insert((d - 1, r));
                    s.extend(out[d - 1][r].iter().copied());
                }
                layer.push(s);
            }
            out.push(layer);
        }
        out
    }

    /// Cofaces of dimension `d + 1` for each `d`-cell (by incidence).
    pub fn cofaces(&self, d: usize) -> Vec<Vec<(usize, i64)>> {
        let mut out = vec![Vec::new(); self.count(d)];
        for (j, col) in self.boundary(d + 1).iter().enumerate() {
            for &(r, v) in col {
                out[r].push((j, v));
            }
        }
        out
    }

    /// Barycentric subdivision: the order complex of the face poset, with
    /// each flag `σ_0 < … < σ_k` at the level of `σ_k`.
    pub fn barycentric_subdivision(&self) -> Self {
        let faces = self.face_sets();
        // Flags ending at each cell, in increasing order.
        let mut flags_at: Vec<Vec<Vec<Vec<(usize, usize)>>>> = Vec::new();
        for d in 0..=self.m {
            let mut layer = Vec::new();
            for j in 0..self.count(d) {
                let mut fl = vec![vec![(d, j)]];
                for &(fd, fj) in &faces[d][j] {
                    for f in &flags_at[fd][fj] {
                        let mut g = f.clone();
                        g.push((d, j));
                        fl.push(g);
                    }
                }
                layer.push(fl);
            }
            flags_at.push(layer);
        }
        let mut cells: Vec<Vec<Cell>> = vec![Vec::new(); self.m + 1];
        let mut index: Vec<HashMap<Vec<(usize, usize)>, usize>> = vec![HashMap::new(); self.m + 1];
        let mut all: Vec<Vec<Vec<(usize, usize)>>> = vec![Vec::new(); self.m + 1];
        for layer in &flags_at {
            for fl in layer {
                for f in fl {
                    let k = f.len() - 1;
                    let &(td, tj) = f.last().unwrap();
                    let top = &self.cells[td][tj];
                    let label = f.iter().map(|&(d, j)| self.cells[d][j].label.as_str()).collect::<Vec<_>>().join("<");
                    index[k].insert(f.clone(), cells[k].len());
                    cells[k].push(Cell { label, level: top.level, on_boundary: top.on_boundary });
                    all[k].push(f.clone());
                }
            }
        }
        let mut boundary: Vec<Vec<SparseCol>> = vec![Vec::new(); self.m + 1];
        boundary[0] = vec![Vec::new(); cells[0].len()];
        for k in 1..=self.m {
            for f in &all[k] {
                let mut col: SparseCol = (0..f.len())
                    .map(|i| {
                        let mut g = f.clone();
                        g.remove(i);
                        (index[k - 1][&g], if i % 2 == 0 { 1 } else { -1 })
                    })
                    .collect();
                col.sort_by_key(|e| e.0);
                boundary[k].push(col);
            }
        }
        FilteredComplex { m: self.m, cells, boundary, has_boundary: self.has_boundary }
    }

    /// Build from maximal simplices given as vertex lists. Every face is
    /// generated and oriented by increasing vertex number. `level` receives
    /// sorted vertex lists; `on_boundary` marks boundary simplices.
    pub fn from_simplices(
        m: usize,
        maximal: &[Vec<usize>],
        level: impl Fn(&[usize]) -> usize,
        on_boundary: Option<&dyn Fn(&[usize]) -> bool>,
    ) -> Result<Self, IhError> {
        let mut simplices: Vec<BTreeSet<Vec<usize>>> = vec![BTreeSet::new(); m + 1];
        for s in maximal {
            let mut s = s.clone();
            s.sort_unstable();
            s.dedup();
            if s.is_empty() || s.len() > m + 1 {
                return Err(IhError::Malformed(format!("simplex {s:?} does not fit dimension {m}")));
            }
            for mask in 1u32..(1 << s.len()) {
                let face: Vec<usize> = s.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &v)| v).collect();
                simplices[face.len() - 1].insert(face);
            }
        }
        let index: Vec<HashMap<&Vec<usize>, usize>> =
            simplices.iter().map(|layer| layer.iter().enumerate().map(|(i, s)| (s, i)).collect()).collect();
        let mut cells = Vec::new();
        let mut boundary = Vec::new();
        for (d, layer) in simplices.iter().enumerate() {
            cells.push(
                layer
                    .iter()
                    .map(|s| Cell {
                        label: s.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("."),
                        level: level(s),
                        on_boundary: on_boundary.is_some_and(|f| f(s)),
                    })
                    .collect(),
            );
            boundary.push(
                layer
                    .iter()
                    .map(|s| {
                        if d == 0 {
                            return Vec::new();
                        }
                        let mut col: SparseCol = (0..s.len())
                            .map(|i| {
                                let mut g = s.clone();
                                g.remove(i);
                                (index[d - 1][&g], if i % 2 == 0 { 1 } else { -1 })
                            })
                            .collect();
                        col.sort_by_key(|e| e.0);
                        col
                    })
                    .collect(),
            );
        }
        FilteredComplex::new(m, cells, boundary, on_boundary.is_some())
    }

    /// JSON: `{dimension, cells: [[ids…] per dimension], boundary: [[cell,
    /// face, coefficient]…], levels: {id: level}, boundary_subcomplex: [ids]}`.
    /// Unlisted cells sit at level `m`.
    pub fn from_json(v: &Value) -> Result<Self, IhError> {
        let bad = |msg: &str| IhError::Format(msg.to_string());
        let m = v.get("dimension").and_then(Value::as_u64).ok_or_else(|| bad("missing 'dimension'"))? as usize;
        let cell_ids = v.get("cells").and_then(Value::as_array).ok_or_else(|| bad("missing 'cells'"))?;
        if cell_ids.len() != m + 1 {
            return Err(bad("'cells' needs one list per dimension 0..=m"));
        }
        let mut pos: HashMap<String, (usize, usize)> = HashMap::new();
        let mut cells: Vec<Vec<Cell>> = Vec::new();
        for (d, layer) in cell_ids.iter().enumerate() {
            let layer = layer.as_array().ok_or_else(|| bad("cell lists must be arrays"))?;
            let mut out = Vec::new();
            for id in layer {
                let id = json_id(id).ok_or_else(|| bad("cell ids must be strings or integers"))?;
                if pos.insert(id.clone(), (d, out.len())).is_some() {
                    return Err(IhError::Format(format!("duplicate cell id '{id}'")));
                }
                out.push(Cell { label: id, level: m, on_boundary: false });
            }
            cells.push(out);
        }
        let mut boundary: Vec<Vec<BTreeMap<usize, i64>>> = cells.iter().map(|l| vec![BTreeMap::new(); l.len()]).collect();
        for entry in v.get("boundary").and_then(Value::as_array).map(|a| a.as_slice()).unwrap_or(&[]) {
            let e = entry.as_array().filter(|e| e.len() == 3).ok_or_else(|| bad("boundary entries are [cell, face, coefficient]"))?;
            let (c, f) = (json_id(&e[0]), json_id(&e[1]));
            let coef = e[2].as_i64().ok_or_else(|| bad("boundary coefficients must be integers"))?;
            let (&(cd, cj), &(fd, fj)) = match (c.as_ref().and_then(|c| pos.get(c)), f.as_ref().and_then(|f| pos.get(f))) {
                (Some(a), Some(b)) => (a, b),
                _ => return Err(IhError::Format(format!("unknown cell in boundary entry {entry}"))),
            };
            if cd != fd + 1 {
                return Err(IhError::Malformed(format!("boundary entry {entry} does not drop dimension by one")));
            }
            *boundary[cd][cj].entry(fj).or_insert(0) += coef;
        }
        if let Some(levels) = v.get("levels") {
            let levels = levels.as_object().ok_or_else(|| bad("'levels' must be an object"))?;
            for (id, l) in levels {
                let &(d, j) = pos.get(id).ok_or_else(|| IhError::Format(format!("unknown cell '{id}' in levels")))?;
                cells[d][j].level = l.as_u64().ok_or_else(|| bad("levels must be nonnegative integers"))? as usize;
            }
        }
        let has_boundary = match v.get("boundary_subcomplex") {
            Some(b) => {
                for id in b.as_array().ok_or_else(|| bad("'boundary_subcomplex' must be an array"))? {
                    let id = json_id(id).ok_or_else(|| bad("cell ids must be strings or integers"))?;
                    let &(d, j) = pos.get(&id).ok_or_else(|| IhError::Format(format!("unknown boundary cell '{id}'")))?;
                    cells[d][j].on_boundary = true;
                }
                true
            }
            None => false,
        };
        let boundary = boundary.into_iter().map(|l| l.into_iter().map(|c| c.into_iter().collect()).collect()).collect();
        FilteredComplex::new(m, cells, boundary, has_boundary)
    }

    pub fn to_json(&self) -> Value {
        let cells: Vec<Vec<&str>> = self.cells.iter().map(|l| l.iter().map(|c| c.label.as_str()).collect()).collect();
        let mut bd = Vec::new();
        for d in 1..=self.m {
            for (j, col) in self.boundary[d].iter().enumerate() {
                for &(r, v) in col {
                    bd.push(json!([self.cells[d][j].label, self.cells[d - 1][r].label, v]));
                }
            }
        }
        let levels: BTreeMap<&str, usize> =
            self.cells.iter().flatten().filter(|c| c.level != self.m).map(|c| (c.label.as_str(), c.level)).collect();
        let mut out = json!({"dimension": self.m, "cells": cells, "boundary": bd, "levels": levels});
        if self.has_boundary {
            let b: Vec<&str> = self.cells.iter().flatten().filter(|c| c.on_boundary).map(|c| c.label.as_str()).collect();
            out["boundary_subcomplex"] = json!(b);
        }
        out
    }
}

fn json_id(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => n.as_i64().map(|i| i.to_string()),
        _ => None,
    }
}

/// Whether `a ∘ b = 0` for sparse column matrices.
pub(crate) fn compose_is_zero(a: &[SparseCol], b: &[SparseCol]) -> bool {
    b.iter().all(|col| {
        let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
        for &(r, v) in col {
            for &(s, w) in &a[r] {
                *acc.entry(s).or_insert(0) += v * w;
            }
        }
        acc.values().all(|&x| x == 0)
    })
}
