//! Exact (or floating point) joint probability tables over finite variables,
//! conditional factors, the DAG factorisation check, truncated
//! factorisation, and evaluation of identification formulas.
//!
//! Tables are dense and indexed in mixed radix, row-major over the variable
//! order (last variable varies fastest).

mod format;
mod scalar;

use std::collections::BTreeMap;
use std::fmt;

use serde::ser::SerializeStruct;
use serde::Serialize;

pub use scalar::{Exact, Scalar, ScalarRepr};

use crate::error::{Error, Result};
use crate::graph::{self, NodeId, NodeSet, PDGraph};
use crate::identify::{self, IdentFormula, IdentQuery};
use crate::mpdag::{self, SaMpdag};

/// Upper bound on the number of joint assignments of any table.
pub const MAX_ASSIGNMENTS: usize = 1 << 20;

/// Default comparison tolerance for floating point distributions.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Sum-to-one tolerance for floating point distributions.
const NORMALISATION_TOLERANCE: f64 = 1e-12;

/// Intervened values, as state indices.
pub type Intervention = BTreeMap<NodeId, usize>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VariableSpec {
    pub name: NodeId,
    pub cardinality: usize,
    pub labels: Option<Vec<String>>,
}

impl VariableSpec {
    pub fn new(name: &str, cardinality: usize) -> Result<Self> {
        if cardinality == 0 {
            return Err(Error::InvalidDistribution(format!("variable {name} has no states")));
        }
        Ok(VariableSpec {
            name: NodeId::new(name)?,
            cardinality,
            labels: None,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.cardinality {
            return Err(Error::InvalidDistribution(format!(
                "variable {} has {} states but {} labels",
                self.name,
                self.cardinality,
                labels.len()
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn label(&self, state: usize) -> String {
        match &self.labels {
            Some(l) => l[state].clone(),
            None => state.to_string(),
        }
    }

    /// Resolves a state given as a label or as an index.
    pub fn state(&self, text: &str) -> Result<usize> {
        if let Some(pos) = self.labels.as_ref().and_then(|l| l.iter().position(|s| s == text)) {
            return Ok(pos);
        }
        match text.parse::<usize>() {
            Ok(i) if i < self.cardinality => Ok(i),
            _ => Err(Error::UnknownState {
                variable: self.name.to_string(),
                state: text.to_string(),
            }),
        }
    }
}

fn strides_for(cards: &[usize]) -> Result<(Vec<usize>, usize)> {
    let mut strides = vec![0; cards.len()];
    let mut size = 1usize;
    for k in (0..cards.len()).rev() {
        strides[k] = size;
        size = size
            .checked_mul(cards[k])
            .filter(|&s| s <= MAX_ASSIGNMENTS)
            .ok_or_else(|| Error::TooLarge(format!("more than {MAX_ASSIGNMENTS} joint assignments")))?;
    }
    Ok((strides, size))
}

/// Steps the digits at positions `free` of `state` to the next assignment in
/// row-major order. Returns `false` once every assignment has been visited.
fn advance(state: &mut [usize], free: &[usize], cards: &[usize]) -> bool {
    for &k in free.iter().rev() {
        state[k] += 1;
        if state[k] < cards[k] {
            return true;
        }
        state[k] = 0;
    }
    false
}

/// Calls `f` on every full assignment that agrees with `fixed`.
fn for_each_assignment<F>(cards: &[usize], fixed: &[Option<usize>], mut f: F) -> Result<()>
where
    F: FnMut(&[usize]) -> Result<()>,
{
    let mut full: Vec<usize> = fixed.iter().map(|s| s.unwrap_or(0)).collect();
    let free: Vec<usize> = (0..cards.len()).filter(|&k| fixed[k].is_none()).collect();
    loop {
        f(&full)?;
        if !advance(&mut full, &free, cards) {
            return Ok(());
        }
    }
}

fn accumulate<S: Scalar>(slot: &mut S, v: S) {
    let cur = std::mem::replace(slot, S::zero());
    *slot = cur + v;
}

/// Joint probability table.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteDistribution<S> {
    vars: Vec<VariableSpec>,
    strides: Vec<usize>,
    probs: Vec<S>,
    tolerance: f64,
}

impl<S: Scalar> DiscreteDistribution<S> {
    /// Builds a distribution from a dense row-major table. Probabilities must
    /// be non-negative and sum to one (exactly, or within `1e-12` for floats).
    pub fn new(vars: Vec<VariableSpec>, probs: Vec<S>) -> Result<Self> {
        for (k, v) in vars.iter().enumerate() {
            if vars[..k].iter().any(|w| w.name == v.name) {
                return Err(Error::InvalidDistribution(format!("variable {} listed twice", v.name)));
            }
        }
        let cards: Vec<usize> = vars.iter().map(|v| v.cardinality).collect();
        let (strides, size) = strides_for(&cards)?;
        if probs.len() != size {
            return Err(Error::InvalidDistribution(format!(
                "expected {size} probabilities, got {}",
                probs.len()
            )));
        }
        if let Some(k) = probs.iter().position(Scalar::is_negative) {
            return Err(Error::InvalidDistribution(format!("negative probability at row {k}")));
        }
        let total = probs.iter().fold(S::zero(), |acc, p| acc + p.clone());
        if !total.approx_eq(&S::one(), NORMALISATION_TOLERANCE) {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {}",
                total.render()
            )));
        }
        Ok(DiscreteDistribution {
            vars,
            strides,
            probs,
            tolerance: DEFAULT_TOLERANCE,
        })
    }

    /// Builds a distribution from a function of the full assignment.
    pub fn from_fn<F>(vars: Vec<VariableSpec>, mut f: F) -> Result<Self>
    where
        F: FnMut(&[usize]) -> S,
    {
        let cards: Vec<usize> = vars.iter().map(|v| v.cardinality).collect();
        strides_for(&cards)?;
        let mut probs = Vec::new();
        for_each_assignment(&cards, &vec![None; cards.len()], |a| {
            probs.push(f(a));
            Ok(())
        })?;
        Self::new(vars, probs)
    }

    /// Builds a distribution from `(assignment, mass)` pairs; repeated
    /// assignments accumulate.
    pub fn from_sparse(vars: Vec<VariableSpec>, entries: Vec<(Vec<usize>, S)>) -> Result<Self> {
        let cards: Vec<usize> = vars.iter().map(|v| v.cardinality).collect();
        let (strides, size) = strides_for(&cards)?;
        let mut probs = vec![S::zero(); size];
        for (a, p) in entries {
            if a.len() != cards.len() || a.iter().zip(&cards).any(|(s, c)| s >= c) {
                return Err(Error::InvalidDistribution(format!("assignment {a:?} out of range")));
            }
            let idx: usize = a.iter().zip(&strides).map(|(s, t)| s * t).sum();
            accumulate(&mut probs[idx], p);
        }
        Self::new(vars, probs)
    }

    pub fn variables(&self) -> &[VariableSpec] {
        &self.vars
    }

    pub fn cards(&self) -> Vec<usize> {
        self.vars.iter().map(|v| v.cardinality).collect()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v.name.as_str() == name)
    }

    fn var_idx(&self, name: &NodeId) -> Result<usize> {
        self.var_index(name.as_str())
            .ok_or_else(|| Error::UnknownNode(name.to_string()))
    }

    /// Variable indices of `s`, ascending.
    fn indices(&self, s: &NodeSet) -> Result<Vec<usize>> {
        let mut out = s.iter().map(|n| self.var_idx(n)).collect::<Result<Vec<_>>>()?;
        out.sort_unstable();
        Ok(out)
    }

    pub fn names(&self) -> NodeSet {
        self.vars.iter().map(|v| v.name.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[S] {
        &self.probs
    }

    pub fn index_of(&self, assignment: &[usize]) -> usize {
        assignment.iter().zip(&self.strides).map(|(s, t)| s * t).sum()
    }

    pub fn prob(&self, assignment: &[usize]) -> &S {
        &self.probs[self.index_of(assignment)]
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// Comparison tolerance used by factorisation checks. Ignored in exact
    /// mode.
    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tolerance = tol;
        self
    }

    /// Builds an intervention from `(variable, state label or index)` pairs.
    pub fn intervention(&self, pairs: &[(&str, &str)]) -> Result<Intervention> {
        let mut out = Intervention::new();
        for (name, state) in pairs {
            let k = self
                .var_index(name)
                .ok_or_else(|| Error::UnknownNode(name.to_string()))?;
            if out.insert(self.vars[k].name.clone(), self.vars[k].state(state)?).is_some() {
                return Err(Error::InvalidQuery(format!("variable {name} intervened twice")));
            }
        }
        Ok(out)
    }

    pub fn describe(&self, assignment: &[usize]) -> String {
        self.vars
            .iter()
            .zip(assignment)
            .map(|(v, &s)| format!("{}={}", v.name, v.label(s)))
            .collect::<Vec<_>>()
            .join(" ")
    }

    fn fixed_from(&self, x: &Intervention) -> Result<Vec<Option<usize>>> {
        let mut fixed = vec![None; self.vars.len()];
        for (name, &state) in x {
            let k = self.var_idx(name)?;
            if state >= self.vars[k].cardinality {
                return Err(Error::UnknownState {
                    variable: name.to_string(),
                    state: state.to_string(),
                });
            }
            fixed[k] = Some(state);
        }
        Ok(fixed)
    }

    fn table(&self, vars: &[usize]) -> Table<S> {
        let cards: Vec<usize> = vars.iter().map(|&v| self.vars[v].cardinality).collect();
        let (strides, size) = strides_for(&cards).expect("sub-table of a valid table");
        let mut t = Table {
            vars: vars.to_vec(),
            strides,
            values: vec![S::zero(); size],
        };
        let all = self.cards();
        let mut full = vec![0; all.len()];
        let free: Vec<usize> = (0..all.len()).collect();
        let mut idx = 0;
        loop {
            let p = &self.probs[idx];
            if !p.is_zero() {
                let k = t.index(&full);
                accumulate(&mut t.values[k], p.clone());
            }
            idx += 1;
            if !advance(&mut full, &free, &all) {
                break;
            }
        }
        t
    }

    fn factor(&self, target: &[usize], given: &[usize]) -> Factor<S> {
        let mut scope: Vec<usize> = target.iter().chain(given).copied().collect();
        scope.sort_unstable();
        let joint = self.table(&scope);
        let given_t = self.table(given);
        let defined: Vec<bool> = given_t.values.iter().map(|v| !v.is_zero()).collect();
        let cards = self.cards();
        let mut fixed = vec![Some(0); cards.len()];
        for &v in &scope {
            fixed[v] = None;
        }
        let mut values = vec![S::zero(); joint.values.len()];
        for_each_assignment(&cards, &fixed, |a| {
            let (k, g) = (joint.index(a), given_t.index(a));
            if defined[g] {
                values[k] = joint.values[k].clone() / given_t.values[g].clone();
            }
            Ok(())
        })
        .expect("infallible");
        Factor {
            target: target.iter().map(|&v| self.vars[v].name.clone()).collect(),
            given: given.iter().map(|&v| self.vars[v].name.clone()).collect(),
            values: Table {
                vars: joint.vars,
                strides: joint.strides,
                values,
            },
            defined: Table {
                vars: given_t.vars,
                strides: given_t.strides,
                values: defined,
            },
        }
    }
}

#[derive(Clone, Debug)]
struct Table<T> {
    vars: Vec<usize>,
    strides: Vec<usize>,
    values: Vec<T>,
}

impl<T> Table<T> {
    fn index(&self, full: &[usize]) -> usize {
        self.vars.iter().zip(&self.strides).map(|(&v, s)| full[v] * s).sum()
    }

    fn at(&self, full: &[usize]) -> &T {
        &self.values[self.index(full)]
    }
}

/// Conditional table `p(target | given)`. Rows whose conditioning event has
/// zero mass are undefined and hold zeros.
#[derive(Clone, Debug)]
pub struct Factor<S> {
    target: Vec<NodeId>,
    given: Vec<NodeId>,
    values: Table<S>,
    defined: Table<bool>,
}

impl<S: Scalar> Factor<S> {
    pub fn target(&self) -> &[NodeId] {
        &self.target
    }

    pub fn given(&self) -> &[NodeId] {
        &self.given
    }

    /// The conditional value at a full assignment (indexed by the source
    /// distribution's variables), or `None` on an undefined row.
    pub fn value(&self, full: &[usize]) -> Option<&S> {
        self.defined
            .at(full)
            .then(|| self.values.at(full))
    }
}

/// A table over outcome variables produced by an intervention.
#[derive(Clone, Debug, PartialEq)]
pub struct InterventionalMarginal<S> {
    specs: Vec<VariableSpec>,
    strides: Vec<usize>,
    x_assignment: Intervention,
    table: Vec<S>,
    undefined_rows: usize,
}

impl<S: Scalar> InterventionalMarginal<S> {
    fn new(specs: Vec<VariableSpec>, x_assignment: Intervention) -> Self {
        let cards: Vec<usize> = specs.iter().map(|v| v.cardinality).collect();
        let (strides, size) = strides_for(&cards).expect("sub-table of a valid table");
        InterventionalMarginal {
            specs,
            strides,
            x_assignment,
            table: vec![S::zero(); size],
            undefined_rows: 0,
        }
    }

    pub fn variables(&self) -> Vec<NodeId> {
        self.specs.iter().map(|v| v.name.clone()).collect()
    }

    pub fn x_assignment(&self) -> &Intervention {
        &self.x_assignment
    }

    pub fn values(&self) -> &[S] {
        &self.table
    }

    /// Number of rows whose value rests on a conditional with a zero-mass
    /// conditioning event; such rows were set to zero.
    pub fn undefined_rows(&self) -> usize {
        self.undefined_rows
    }

    pub fn get(&self, states: &[usize]) -> &S {
        let idx: usize = states.iter().zip(&self.strides).map(|(s, t)| s * t).sum();
        &self.table[idx]
    }

    pub fn total(&self) -> S {
        self.table.iter().fold(S::zero(), |a, v| a + v.clone())
    }

    /// Every row as `(states, value)` in row-major order.
    pub fn rows(&self) -> Vec<(Vec<usize>, S)> {
        let cards: Vec<usize> = self.specs.iter().map(|v| v.cardinality).collect();
        let mut out = Vec::with_capacity(self.table.len());
        for_each_assignment(&cards, &vec![None; cards.len()], |a| {
            out.push((a.to_vec(), self.get(a).clone()));
            Ok(())
        })
        .expect("infallible");
        out
    }

    pub fn describe(&self, states: &[usize]) -> String {
        self.specs
            .iter()
            .zip(states)
            .map(|(v, &s)| format!("{}={}", v.name, v.label(s)))
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Sums out every variable not in `keep`.
    pub fn marginalize(&self, keep: &NodeSet) -> Result<Self> {
        for k in keep {
            if !self.specs.iter().any(|v| &v.name == k) {
                return Err(Error::UnknownNode(k.to_string()));
            }
        }
        let kept: Vec<usize> = (0..self.specs.len())
            .filter(|&i| keep.contains(&self.specs[i].name))
            .collect();
        let mut out = Self::new(
            kept.iter().map(|&i| self.specs[i].clone()).collect(),
            self.x_assignment.clone(),
        );
        out.undefined_rows = self.undefined_rows;
        for (states, v) in self.rows() {
            let sub: Vec<usize> = kept.iter().map(|&i| states[i]).collect();
            let idx: usize = sub.iter().zip(&out.strides).map(|(s, t)| s * t).sum();
            accumulate(&mut out.table[idx], v);
        }
        Ok(out)
    }

    /// The first row where the two tables differ by more than `tol` (exactly,
    /// in exact mode), with the absolute difference.
    pub fn first_difference(&self, other: &Self, tol: f64) -> Option<(Vec<usize>, f64)> {
        if self.specs != other.specs {
            return Some((Vec::new(), f64::INFINITY));
        }
        self.rows()
            .into_iter()
            .zip(&other.table)
            .find(|((_, a), b)| !a.approx_eq(b, tol))
            .map(|((states, a), b)| {
                let diff = (a.to_f64() - b.to_f64()).abs();
                (states, diff)
            })
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.first_difference(other, tol).is_none()
    }
}

impl<S: Scalar> fmt::Display for InterventionalMarginal<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = self.specs.iter().map(|v| v.name.to_string()).collect();
        let x: Vec<String> = self
            .x_assignment
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        writeln!(f, "p({} | do({}))", names.join(","), x.join(","))?;
        for (states, v) in self.rows() {
            writeln!(f, "  {}  {}", self.describe(&states), v.render())?;
        }
        if self.undefined_rows > 0 {
            writeln!(f, "  ({} undefined rows set to 0)", self.undefined_rows)?;
        }
        Ok(())
    }
}

#[derive(Serialize)]
struct RowRepr {
    states: Vec<String>,
    p: ScalarRepr,
}

impl<S: Scalar> Serialize for InterventionalMarginal<S> {
    fn serialize<Ser: serde::Serializer>(&self, ser: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        let x: BTreeMap<String, String> = self
            .x_assignment
            .iter()
            .map(|(k, &v)| (k.to_string(), v.to_string()))
            .collect();
        let rows: Vec<RowRepr> = self
            .rows()
            .into_iter()
            .map(|(states, v)| RowRepr {
                states: states
                    .iter()
                    .zip(&self.specs)
                    .map(|(&s, spec)| spec.label(s))
                    .collect(),
                p: v.repr(),
            })
            .collect();
        let mut st = ser.serialize_struct("InterventionalMarginal", 4)?;
        st.serialize_field("variables", &self.variables())?;
        st.serialize_field("x", &x)?;
        st.serialize_field("rows", &rows)?;
        st.serialize_field("undefined_rows", &self.undefined_rows)?;
        st.end()
    }
}

// ---------------------------------------------------------------------------
// operations

/// Marginal distribution over `s`.
pub fn marginal<S: Scalar>(p: &DiscreteDistribution<S>, s: &NodeSet) -> Result<DiscreteDistribution<S>> {
    let idx = p.indices(s)?;
    let t = p.table(&idx);
    Ok(DiscreteDistribution {
        vars: idx.iter().map(|&v| p.vars[v].clone()).collect(),
        strides: t.strides,
        probs: t.values,
        tolerance: p.tolerance,
    })
}

/// `p(target | given)`.
pub fn conditional<S: Scalar>(p: &DiscreteDistribution<S>, target: &NodeSet, given: &NodeSet) -> Result<Factor<S>> {
    if let Some(v) = target.intersection(given).next() {
        return Err(Error::InvalidQuery(format!("{v} is both target and conditioning variable")));
    }
    Ok(p.factor(&p.indices(target)?, &p.indices(given)?))
}

/// Distribution variable index of each graph node; the two name sets must
/// coincide.
fn var_map<S: Scalar>(p: &DiscreteDistribution<S>, g: &PDGraph) -> Result<Vec<usize>> {
    if p.names() != g.node_set() {
        return Err(Error::NodeSetMismatch(format!(
            "distribution over {:?}, graph over {:?}",
            graph::names_of(&p.names()),
            graph::names_of(g.nodes())
        )));
    }
    g.nodes().iter().map(|n| p.var_idx(n)).collect()
}

fn topological(g: &PDGraph) -> Vec<usize> {
    let n = g.n();
    let mut indeg: Vec<usize> = (0..n).map(|i| g.parents_of(i).count()).collect();
    let mut ready: Vec<usize> = (0..n).rev().filter(|&i| indeg[i] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(v) = ready.pop() {
        order.push(v);
        for c in g.children_of(v) {
            indeg[c] -= 1;
            if indeg[c] == 0 {
                ready.push(c);
            }
        }
    }
    order
}

fn require_dag(dag: &PDGraph) -> Result<()> {
    if !graph::is_dag(dag) {
        return Err(Error::NotADag("expected a directed acyclic graph".into()));
    }
    Ok(())
}

/// The first full assignment where `p` differs from the product of its
/// parent-conditionals under `dag`. Assignments with a zero-mass parent
/// configuration impose no constraint.
pub fn markov_violation<S: Scalar>(p: &DiscreteDistribution<S>, dag: &PDGraph) -> Result<Option<Vec<usize>>> {
    require_dag(dag)?;
    let map = var_map(p, dag)?;
    let mut families = Vec::new();
    for (node, &v) in map.iter().enumerate() {
        let mut pa: Vec<usize> = dag.parents_of(node).map(|q| map[q]).collect();
        pa.sort_unstable();
        let mut fam = pa.clone();
        fam.push(v);
        fam.sort_unstable();
        families.push((p.table(&fam), p.table(&pa)));
    }
    let cards = p.cards();
    let mut violation = None;
    let mut idx = 0usize;
    let _ = for_each_assignment(&cards, &vec![None; cards.len()], |a| {
        let pv = &p.probs[idx];
        idx += 1;
        if families.iter().any(|(_, pa)| pa.at(a).is_zero()) {
            return Ok(());
        }
        let rhs = if families.iter().any(|(fam, _)| fam.at(a).is_zero()) {
            S::zero()
        } else {
            families.iter().fold(S::one(), |acc, (fam, pa)| {
                acc * (fam.at(a).clone() / pa.at(a).clone())
            })
        };
        if !rhs.approx_eq(pv, p.tolerance) {
            violation = Some(a.to_vec());
            return Err(Error::Precondition(String::new()));
        }
        Ok(())
    });
    Ok(violation)
}

/// Whether `p` factorises according to `dag`.
pub fn is_markov_to_dag<S: Scalar>(p: &DiscreteDistribution<S>, dag: &PDGraph) -> Result<bool> {
    Ok(markov_violation(p, dag)?.is_none())
}

/// Compatibility with an SA-MPDAG, checked on one represented DAG (every
/// represented DAG is Markov equivalent to the SA-MPDAG).
pub fn is_compatible<S: Scalar>(p: &DiscreteDistribution<S>, g: &SaMpdag) -> Result<bool> {
    is_markov_to_dag(p, &mpdag::first_extension(g)?)
}

/// Compatibility checked against every represented DAG; errors if the DAGs
/// disagree.
pub fn is_compatible_exhaustive<S: Scalar>(p: &DiscreteDistribution<S>, g: &SaMpdag) -> Result<bool> {
    let verdicts = mpdag::enumerate_extensions(g)?
        .iter()
        .map(|d| is_markov_to_dag(p, d))
        .collect::<Result<Vec<_>>>()?;
    if verdicts.iter().any(|&v| v != verdicts[0]) {
        return Err(Error::Precondition(
            "represented DAGs disagree on the factorisation check".into(),
        ));
    }
    Ok(verdicts[0])
}

/// The truncated factorisation `prod_{v not in x} p(v | pa(v))` with treated
/// parents fixed, as a table over all non-treated variables.
pub fn truncated_factorization<S: Scalar>(
    p: &DiscreteDistribution<S>,
    dag: &PDGraph,
    x: &Intervention,
) -> Result<InterventionalMarginal<S>> {
    require_dag(dag)?;
    let map = var_map(p, dag)?;
    let fixed = p.fixed_from(x)?;
    let mut factors = Vec::new();
    for node in topological(dag) {
        let v = map[node];
        if fixed[v].is_some() {
            continue;
        }
        let mut pa: Vec<usize> = dag.parents_of(node).map(|q| map[q]).collect();
        pa.sort_unstable();
        factors.push(p.factor(&[v], &pa));
    }
    let out_vars: Vec<usize> = (0..p.vars.len()).filter(|&v| fixed[v].is_none()).collect();
    let mut out = InterventionalMarginal::new(
        out_vars.iter().map(|&v| p.vars[v].clone()).collect(),
        x.clone(),
    );
    let mut k = 0;
    for_each_assignment(&p.cards(), &fixed, |a| {
        let mut running = S::one();
        for f in &factors {
            match f.value(a) {
                Some(v) => running = running * v.clone(),
                None => {
                    running = S::zero();
                    out.undefined_rows += 1;
                }
            }
            if running.is_zero() {
                break;
            }
        }
        out.table[k] = running;
        k += 1;
        Ok(())
    })?;
    Ok(out)
}

fn check_intervention(x: &Intervention, treatment: &NodeSet) -> Result<()> {
    let keys: NodeSet = x.keys().cloned().collect();
    if &keys != treatment {
        return Err(Error::InvalidQuery(format!(
            "intervention assigns {:?} but treatment is {:?}",
            graph::names_of(&keys),
            graph::names_of(treatment)
        )));
    }
    Ok(())
}

/// Sums the formula's block product over its integrand variables.
pub fn evaluate_formula<S: Scalar>(
    f: &IdentFormula,
    p: &DiscreteDistribution<S>,
    x: &Intervention,
) -> Result<InterventionalMarginal<S>> {
    check_intervention(x, &f.treatment)?;
    let mut fixed = p.fixed_from(x)?;
    let enumerated: NodeSet = f.integrand_vars.union(&f.outcome).cloned().collect();
    let enum_idx = p.indices(&enumerated)?;
    let factors = f
        .blocks
        .iter()
        .map(|b| {
            for pa in &b.parents {
                if !enumerated.contains(pa) && !x.contains_key(pa) {
                    return Err(Error::Precondition(format!(
                        "parent {pa} of block {:?} is neither summed nor intervened",
                        graph::names_of(&b.nodes)
                    )));
                }
            }
            Ok((b, p.factor(&p.indices(&b.nodes)?, &p.indices(&b.parents)?)))
        })
        .collect::<Result<Vec<_>>>()?;
    // Everything outside the formula's scope is pinned to state 0; factors
    // never read those positions.
    for (v, slot) in fixed.iter_mut().enumerate() {
        if slot.is_none() && !enum_idx.contains(&v) {
            *slot = Some(0);
        }
    }
    let y_idx = p.indices(&f.outcome)?;
    let mut out = InterventionalMarginal::new(
        y_idx.iter().map(|&v| p.vars[v].clone()).collect(),
        x.clone(),
    );
    for_each_assignment(&p.cards(), &fixed, |a| {
        let mut running = S::one();
        for (block, factor) in &factors {
            match factor.value(a) {
                Some(v) => running = running * v.clone(),
                None => {
                    return Err(Error::UndefinedRow(format!(
                        "p({} | {}) conditions on a zero-probability event at {}",
                        graph::names_of(&block.nodes).join(","),
                        graph::names_of(&block.parents).join(","),
                        p.describe(a)
                    )))
                }
            }
            if running.is_zero() {
                break;
            }
        }
        let states: Vec<usize> = y_idx.iter().map(|&v| a[v]).collect();
        let k: usize = states.iter().zip(&out.strides).map(|(s, t)| s * t).sum();
        accumulate(&mut out.table[k], running);
        Ok(())
    })?;
    Ok(out)
}

/// `sum p(v) / prod_j p(x_j | pa(x_j))` over all non-outcome variables, with
/// the treated ancestors of `y` fixed and their chain blocks `x_j` as
/// re-weighting terms. Treated non-ancestors of `y` are summed out with the
/// rest.
pub fn reweight_marginal<S: Scalar>(
    p: &DiscreteDistribution<S>,
    g: &SaMpdag,
    q: &IdentQuery,
    x: &Intervention,
) -> Result<InterventionalMarginal<S>> {
    check_intervention(x, q.x())?;
    let pd = g.graph();
    var_map(p, pd)?;
    if let Some(path) = graph::blocking_path(pd, q.x(), q.y())? {
        return Err(Error::NotIdentifiable {
            graph: 0,
            path: graph::names_of(&path),
        });
    }
    let a = identify::a_set(g, q)?;
    let factors = graph::chain_decomposition(pd, &a)?
        .into_iter()
        .map(|block| {
            let pa = graph::parents(pd, &block)?;
            Ok((block.clone(), p.factor(&p.indices(&block)?, &p.indices(&pa)?)))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut fixed = vec![None; p.vars.len()];
    for node in &a {
        let k = p.var_idx(node)?;
        fixed[k] = Some(x[node]);
    }
    let y_idx = p.indices(q.y())?;
    let mut out = InterventionalMarginal::new(
        y_idx.iter().map(|&v| p.vars[v].clone()).collect(),
        x.clone(),
    );
    for_each_assignment(&p.cards(), &fixed, |v| {
        let num = p.prob(v);
        if num.is_zero() {
            return Ok(());
        }
        let mut den = S::one();
        for (block, factor) in &factors {
            match factor.value(v) {
                Some(d) if !d.is_zero() => den = den * d.clone(),
                _ => {
                    return Err(Error::UndefinedRow(format!(
                        "re-weighting undefined: p({} | pa) vanishes at {}",
                        graph::names_of(block).join(","),
                        p.describe(v)
                    )))
                }
            }
        }
        let states: Vec<usize> = y_idx.iter().map(|&k| v[k]).collect();
        let k: usize = states.iter().zip(&out.strides).map(|(s, t)| s * t).sum();
        accumulate(&mut out.table[k], num.clone() / den);
        Ok(())
    })?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::identify::build_formula;

    fn set(names: &[&str]) -> NodeSet {
        graph::node_set(names.iter().copied()).unwrap()
    }

    fn binary(names: &[&str]) -> Vec<VariableSpec> {
        names.iter().map(|n| VariableSpec::new(n, 2).unwrap()).collect()
    }

    fn r(n: u64, d: u64) -> Exact {
        Exact::from_ratio(n, d)
    }

    /// a -> b with p(a=1) = 1/4, p(b=a) = 3/4
    fn chain_ab() -> DiscreteDistribution<Exact> {
        DiscreteDistribution::from_fn(binary(&["a", "b"]), |s| {
            let pa = if s[0] == 1 { r(1, 4) } else { r(3, 4) };
            let pb = if s[0] == s[1] { r(3, 4) } else { r(1, 4) };
            pa * pb
        })
        .unwrap()
    }

    #[test]
    fn rejects_malformed_tables() {
        assert!(DiscreteDistribution::new(binary(&["a"]), vec![r(1, 2)]).is_err());
        assert!(DiscreteDistribution::new(binary(&["a"]), vec![r(1, 2), r(1, 4)]).is_err());
        assert!(DiscreteDistribution::new(binary(&["a", "a"]), vec![r(1, 4); 4]).is_err());
        assert!(DiscreteDistribution::new(binary(&["a"]), vec![-1.0, 2.0]).is_err());
        assert!(VariableSpec::new("a", 0).is_err());
        assert!(VariableSpec::new("a", 2).unwrap().with_labels(vec!["x".into()]).is_err());
        let huge: Vec<VariableSpec> = (0..21).map(|i| VariableSpec::new(&format!("v{i}"), 2).unwrap()).collect();
        assert!(matches!(DiscreteDistribution::<f64>::from_fn(huge, |_| 0.0), Err(Error::TooLarge(_))));
    }

    #[test]
    fn marginal_examples() {
        let p = chain_ab();
        assert_eq!(marginal(&p, &set(&["a", "b"])).unwrap(), p);
        let m = marginal(&p, &set(&["b"])).unwrap();
        // p(b=1) = 3/4 * 1/4 + 1/4 * 3/4
        assert_eq!(m.probs(), &[r(5, 8), r(3, 8)]);
        let u = DiscreteDistribution::new(binary(&["a", "b"]), vec![r(1, 4); 4]).unwrap();
        assert_eq!(marginal(&u, &set(&["a"])).unwrap().probs(), &[r(1, 2), r(1, 2)]);
    }

    #[test]
    fn conditional_examples() {
        let p = chain_ab();
        let f = conditional(&p, &set(&["b"]), &set(&["a"])).unwrap();
        assert_eq!(f.value(&[1, 1]), Some(&r(3, 4)));
        assert_eq!(f.value(&[1, 0]), Some(&r(1, 4)));
        let f = conditional(&p, &set(&["b"]), &NodeSet::new()).unwrap();
        assert_eq!(f.value(&[0, 1]), Some(&r(3, 8)));
        // zero-mass conditioning rows are undefined
        let d = DiscreteDistribution::new(binary(&["a", "b"]), vec![r(1, 2), r(1, 2), r(0, 1), r(0, 1)]).unwrap();
        let f = conditional(&d, &set(&["b"]), &set(&["a"])).unwrap();
        assert_eq!(f.value(&[1, 0]), None);
        assert_eq!(f.value(&[0, 0]), Some(&r(1, 2)));
        assert!(conditional(&d, &set(&["a"]), &set(&["a"])).is_err());
    }

    #[test]
    fn markov_examples() {
        let p = chain_ab();
        let ab: PDGraph = "nodes a b\na -> b".parse().unwrap();
        let empty: PDGraph = "nodes a b".parse().unwrap();
        assert!(is_markov_to_dag(&p, &ab).unwrap());
        assert!(!is_markov_to_dag(&p, &empty).unwrap());
        let u = DiscreteDistribution::new(binary(&["a", "b"]), vec![r(1, 4); 4]).unwrap();
        assert!(is_markov_to_dag(&u, &empty).unwrap());
        let other: PDGraph = "nodes a c\na -> c".parse().unwrap();
        assert!(matches!(is_markov_to_dag(&p, &other), Err(Error::NodeSetMismatch(_))));
        let und: PDGraph = "nodes a b\na -- b".parse().unwrap();
        assert!(matches!(is_markov_to_dag(&p, &und), Err(Error::NotADag(_))));
    }

    #[test]
    fn point_mass_correlation_is_incompatible_with_edgeless_graph() {
        let p = DiscreteDistribution::new(binary(&["a", "b"]), vec![r(1, 2), r(0, 1), r(0, 1), r(1, 2)]).unwrap();
        let g = mpdag::validate_sa_mpdag("nodes a b".parse().unwrap()).unwrap();
        assert!(!is_compatible(&p, &g).unwrap());
        let g = mpdag::validate_sa_mpdag("nodes a b\na -- b".parse().unwrap()).unwrap();
        assert!(is_compatible_exhaustive(&p, &g).unwrap());
    }

    #[test]
    fn truncated_factorization_examples() {
        let p = chain_ab();
        let ab: PDGraph = "nodes a b\na -> b".parse().unwrap();
        let none = truncated_factorization(&p, &ab, &Intervention::new()).unwrap();
        assert_eq!(none.values(), p.probs());
        let x = p.intervention(&[("a", "1")]).unwrap();
        let t = truncated_factorization(&p, &ab, &x).unwrap();
        assert_eq!(t.values(), &[r(1, 4), r(3, 4)]);
        let all = p.intervention(&[("a", "0"), ("b", "1")]).unwrap();
        let t = truncated_factorization(&p, &ab, &all).unwrap();
        assert_eq!(t.values(), &[r(1, 1)]);
        assert_eq!(t.total(), r(1, 1));
    }

    #[test]
    fn truncated_factorization_counts_undefined_rows() {
        // a is never 1, so p(b | a=1) is undefined
        let p = DiscreteDistribution::new(binary(&["a", "b"]), vec![r(1, 2), r(1, 2), r(0, 1), r(0, 1)]).unwrap();
        let ab: PDGraph = "nodes a b\na -> b".parse().unwrap();
        let x = p.intervention(&[("a", "1")]).unwrap();
        let t = truncated_factorization(&p, &ab, &x).unwrap();
        assert_eq!(t.undefined_rows(), 2);
        assert_eq!(t.total(), r(0, 1));
    }

    #[test]
    fn evaluate_formula_single_row() {
        // y's only parent is treated: the result is one conditional row
        let p = chain_ab();
        let g = mpdag::validate_sa_mpdag("nodes a b\na -> b".parse().unwrap()).unwrap();
        let q = IdentQuery::from_names(&["a"], &["b"]).unwrap();
        let f = build_formula(&g, &q).unwrap();
        let x = p.intervention(&[("a", "0")]).unwrap();
        assert_eq!(evaluate_formula(&f, &p, &x).unwrap().values(), &[r(3, 4), r(1, 4)]);
        let wrong = p.intervention(&[("b", "0")]).unwrap();
        assert!(matches!(evaluate_formula(&f, &p, &wrong), Err(Error::InvalidQuery(_))));
    }

    #[test]
    fn evaluate_formula_reports_undefined_rows() {
        let p = DiscreteDistribution::new(binary(&["a", "b"]), vec![r(1, 2), r(1, 2), r(0, 1), r(0, 1)]).unwrap();
        let g = mpdag::validate_sa_mpdag("nodes a b\na -> b".parse().unwrap()).unwrap();
        let q = IdentQuery::from_names(&["a"], &["b"]).unwrap();
        let f = build_formula(&g, &q).unwrap();
        let x = p.intervention(&[("a", "1")]).unwrap();
        assert!(matches!(evaluate_formula(&f, &p, &x), Err(Error::UndefinedRow(_))));
        // no positive-mass row reaches the vanishing denominator
        assert_eq!(reweight_marginal(&p, &g, &q, &x).unwrap().total(), r(0, 1));
    }

    #[test]
    fn reweight_without_treated_ancestors_is_observational() {
        let p = chain_ab();
        let g = mpdag::validate_sa_mpdag("nodes a b\nb -> a".parse().unwrap()).unwrap();
        let q = IdentQuery::from_names(&["a"], &["b"]).unwrap();
        let x = p.intervention(&[("a", "1")]).unwrap();
        let m = reweight_marginal(&p, &g, &q, &x).unwrap();
        assert_eq!(m.values(), marginal(&p, &set(&["b"])).unwrap().probs());
    }

    #[test]
    fn fig2_formula_matches_hand_expansion() {
        // sum_{x1} p(5 | x1, 4=v) p(x1) on a density generated over g2
        let g = fixtures::fig2_g2();
        let vars = binary(&["1", "2", "3", "4", "5"]);
        let w = |s: &[usize]| -> Exact {
            let p1 = if s[0] == 1 { r(1, 3) } else { r(2, 3) };
            let p3 = if s[2] == 1 { r(1, 5) } else { r(4, 5) };
            let p4 = if s[3] == s[0] { r(5, 7) } else { r(2, 7) };
            let p2 = if s[1] == (s[0] ^ s[2]) { r(3, 4) } else { r(1, 4) };
            let p5 = if s[4] == (s[0] & s[3]) { r(7, 9) } else { r(2, 9) };
            p1 * p2 * p3 * p4 * p5
        };
        let p = DiscreteDistribution::from_fn(vars, w).unwrap();
        let q = IdentQuery::from_names(&["4"], &["5"]).unwrap();
        let x = p.intervention(&[("4", "1")]).unwrap();
        let m = evaluate_formula(&build_formula(&g, &q).unwrap(), &p, &x).unwrap();
        // p(5=1 | do(4=1)) = p(1=0) * 2/9 + p(1=1) * 7/9
        let want = r(2, 3) * r(2, 9) + r(1, 3) * r(7, 9);
        assert_eq!(m.get(&[1]), &want);
        assert_eq!(reweight_marginal(&p, &g, &q, &x).unwrap(), m);
    }
}
