use std::collections::BTreeSet;
use std::fmt;

use serde_json::{Map, Value};

use super::EngineError;
use crate::graph::{Dag, GraphError};
use crate::vars::VariableTable;

/// How a pair of cells reads as an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeMark {
    Absent,
    Undirected,
    /// row -> column
    Forward,
    /// column -> row
    Backward,
}

/// Square 0/1 matrix over a [`VariableTable`].
///
/// `m[r][c] = 1, m[c][r] = 1` is an undirected edge, `m[r][c] = 1, m[c][r] = 0`
/// is `r -> c`, and two zeros mean no edge.
#[derive(Clone, PartialEq, Eq)]
pub struct AdjMatrix {
    vars: VariableTable,
    cells: Vec<u8>,
}

impl AdjMatrix {
    /// All off-diagonal cells set.
    pub fn complete(vars: VariableTable) -> Self {
        let n = vars.len();
        let mut cells = vec![1; n * n];
        for i in 0..n {
            cells[i * n + i] = 0;
        }
        Self { vars, cells }
    }

    pub fn zeros(vars: VariableTable) -> Self {
        let n = vars.len();
        Self {
            vars,
            cells: vec![0; n * n],
        }
    }

    pub fn from_rows(vars: VariableTable, rows: &[Vec<u8>]) -> Result<Self, EngineError> {
        let n = vars.len();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(EngineError::Shape { expected: n });
        }
        let mut m = Self::zeros(vars);
        for (r, row) in rows.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                if v > 1 {
                    return Err(EngineError::CellValue { row: r, col: c, value: v });
                }
                if r == c && v != 0 {
                    return Err(EngineError::Diagonal(r));
                }
                m.cells[r * n + c] = v;
            }
        }
        Ok(m)
    }

    /// Skeleton undirected, v-structure edges directed.
    pub fn pattern_of(vars: VariableTable, dag: &Dag) -> Result<Self, EngineError> {
        if vars.len() != dag.n() {
            return Err(EngineError::Shape { expected: vars.len() });
        }
        let mut m = Self::zeros(vars);
        for (p, c) in dag.edges() {
            m.set(p, c, 1);
            m.set(c, p, 1);
        }
        for (x, c, y) in crate::graph::v_structures(dag) {
            m.set(c, x, 0);
            m.set(c, y, 0);
        }
        Ok(m)
    }

    /// Directed edges as given, the rest of the skeleton undirected.
    pub fn from_edges(
        vars: VariableTable,
        directed: &[(usize, usize)],
        undirected: &[(usize, usize)],
    ) -> Self {
        let mut m = Self::zeros(vars);
        for &(a, b) in directed {
            m.set(a, b, 1);
        }
        for &(a, b) in undirected {
            m.set(a, b, 1);
            m.set(b, a, 1);
        }
        m
    }

    pub fn n(&self) -> usize {
        self.vars.len()
    }

    pub fn vars(&self) -> &VariableTable {
        &self.vars
    }

    pub fn get(&self, r: usize, c: usize) -> u8 {
        self.cells[r * self.n() + c]
    }

    pub(crate) fn set(&mut self, r: usize, c: usize, v: u8) {
        let n = self.n();
        self.cells[r * n + c] = v;
    }

    pub fn row(&self, r: usize) -> &[u8] {
        let n = self.n();
        &self.cells[r * n..(r + 1) * n]
    }

    pub fn ones(&self) -> usize {
        self.cells.iter().filter(|&&v| v == 1).count()
    }

    pub fn mark(&self, r: usize, c: usize) -> EdgeMark {
        match (self.get(r, c), self.get(c, r)) {
            (1, 1) => EdgeMark::Undirected,
            (1, 0) => EdgeMark::Forward,
            (0, 1) => EdgeMark::Backward,
            _ => EdgeMark::Absent,
        }
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.mark(a, b) != EdgeMark::Absent
    }

    pub fn directed(&self, from: usize, to: usize) -> bool {
        self.mark(from, to) == EdgeMark::Forward
    }

    pub fn undirected(&self, a: usize, b: usize) -> bool {
        self.mark(a, b) == EdgeMark::Undirected
    }

    pub fn directed_edges(&self) -> Vec<(usize, usize)> {
        let n = self.n();
        (0..n)
            .flat_map(|r| (0..n).map(move |c| (r, c)))
            .filter(|&(r, c)| r != c && self.directed(r, c))
            .collect()
    }

    pub fn undirected_edges(&self) -> Vec<(usize, usize)> {
        crate::graph::unordered_pairs(self.n())
            .filter(|&(a, b)| self.undirected(a, b))
            .collect()
    }

    pub fn skeleton(&self) -> BTreeSet<(usize, usize)> {
        crate::graph::unordered_pairs(self.n())
            .filter(|&(a, b)| self.adjacent(a, b))
            .collect()
    }

    /// Oriented colliders `x -> c <- y` with `x`, `y` non-adjacent, `x < y`.
    pub fn colliders(&self) -> BTreeSet<(usize, usize, usize)> {
        let n = self.n();
        let mut out = BTreeSet::new();
        for c in 0..n {
            let parents: Vec<usize> = (0..n).filter(|&p| self.directed(p, c)).collect();
            for (i, &x) in parents.iter().enumerate() {
                for &y in &parents[i + 1..] {
                    if !self.adjacent(x, y) {
                        out.insert((x, c, y));
                    }
                }
            }
        }
        out
    }

    /// Checks the partially-directed encoding: zero diagonal and no directed cycle.
    pub fn validate_pdag(&self) -> Result<(), EngineError> {
        let n = self.n();
        for i in 0..n {
            if self.get(i, i) != 0 {
                return Err(EngineError::Diagonal(i));
            }
        }
        if n == 0 {
            return Ok(());
        }
        if n > crate::graph::MAX_NODES {
            return Err(EngineError::Graph(GraphError::NodeCount {
                n,
                max: crate::graph::MAX_NODES,
            }));
        }
        Dag::new(n, self.directed_edges()).map_err(|e| match e {
            GraphError::Cyclic => EngineError::DirectedCycle,
            other => EngineError::Graph(other),
        })?;
        Ok(())
    }

    /// Nested-object form keyed by label, rows and columns in table order.
    pub fn to_json(&self) -> Value {
        let n = self.n();
        let mut outer = Map::new();
        for r in 0..n {
            let mut row = Map::new();
            for c in 0..n {
                row.insert(self.vars.label(c).to_string(), Value::from(self.get(r, c)));
            }
            outer.insert(self.vars.label(r).to_string(), Value::Object(row));
        }
        Value::Object(outer)
    }

    /// Single-line text form: `{"A": {"A": 0, "B": 1}, "B": {"A": 1, "B": 0}}`.
    pub fn to_text(&self) -> String {
        let n = self.n();
        let rows: Vec<String> = (0..n)
            .map(|r| {
                let cells: Vec<String> = (0..n)
                    .map(|c| format!("\"{}\": {}", self.vars.label(c), self.get(r, c)))
                    .collect();
                format!("\"{}\": {{{}}}", self.vars.label(r), cells.join(", "))
            })
            .collect();
        format!("{{{}}}", rows.join(", "))
    }
}

impl fmt::Debug for AdjMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AdjMatrix{}", self.to_text())
    }
}

impl fmt::Display for AdjMatrix {
    /// Grid layout, one row per line.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.n();
        let width = self.vars.labels().map(str::len).max().unwrap_or(1);
        write!(f, "{:width$}", "")?;
        for c in 0..n {
            write!(f, " {:>width$}", self.vars.label(c))?;
        }
        writeln!(f)?;
        for r in 0..n {
            write!(f, "{:width$}", self.vars.label(r))?;
            for c in 0..n {
                write!(f, " {:>width$}", self.get(r, c))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_form_matches_worked_layout() {
        let m = AdjMatrix::complete(VariableTable::letters(3));
        assert_eq!(
            m.to_text(),
            r#"{"A": {"A": 0, "B": 1, "C": 1}, "B": {"A": 1, "B": 0, "C": 1}, "C": {"A": 1, "B": 1, "C": 0}}"#
        );
    }

    #[test]
    fn marks_and_colliders() {
        let vars = VariableTable::letters(3);
        let m = AdjMatrix::from_edges(vars, &[(0, 2), (1, 2)], &[]);
        assert_eq!(m.mark(0, 2), EdgeMark::Forward);
        assert_eq!(m.mark(2, 0), EdgeMark::Backward);
        assert_eq!(m.mark(0, 1), EdgeMark::Absent);
        assert_eq!(m.colliders(), BTreeSet::from([(0, 2, 1)]));
        m.validate_pdag().unwrap();
    }

    #[test]
    fn rejects_bad_cells() {
        let vars = VariableTable::letters(2);
        assert!(matches!(
            AdjMatrix::from_rows(vars.clone(), &[vec![1, 1], vec![1, 0]]),
            Err(EngineError::Diagonal(0))
        ));
        assert!(matches!(
            AdjMatrix::from_rows(vars.clone(), &[vec![0, 2], vec![1, 0]]),
            Err(EngineError::CellValue { .. })
        ));
        assert!(AdjMatrix::from_rows(vars, &[vec![0, 1]]).is_err());
    }

    #[test]
    fn directed_cycle_is_invalid() {
        let vars = VariableTable::letters(3);
        let m = AdjMatrix::from_edges(vars, &[(0, 1), (1, 2), (2, 0)], &[]);
        assert!(matches!(m.validate_pdag(), Err(EngineError::DirectedCycle)));
    }
}
