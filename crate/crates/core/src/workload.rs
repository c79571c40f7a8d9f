//! The optimization instance: queries, candidate views, their cost
//! parameters and the storage / response-time constraints.
//!
//! Instances are stored as JSON documents:
//!
//! ```json
//! {
//!   "format_version": 1,
//!   "name": "example",
//!   "queries": [{ "id": 0, "weight": 1.0, "base_cost": 100.0 }],
//!   "views": [{ "id": 0, "storage_size": 50.0, "maintenance_cost": 5.0,
//!               "answer_costs": [[0, 10.0]] }],
//!   "constraints": { "storage_budget": 60.0, "max_response_time": null }
//! }
//! ```
//!
//! `weight` defaults to 1.0 and `max_response_time` may be omitted.

use std::fs;
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::encoding::Chromosome;
use crate::error::{invalid_param, Error, Result};
use crate::fitness::Objectives;

pub const WORKLOAD_FORMAT_VERSION: u32 = 1;

fn default_weight() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Query {
    pub id: usize,
    /// Relative frequency.
    #[serde(default = "default_weight")]
    pub weight: f64,
    /// Cost of answering the query from base tables.
    pub base_cost: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CandidateView {
    pub id: usize,
    /// Bytes.
    pub storage_size: f64,
    /// Cost units per refresh cycle.
    pub maintenance_cost: f64,
    /// `(query id, cost)` pairs, sorted by query id. A query not listed cannot
    /// be answered from this view.
    pub answer_costs: Vec<(usize, f64)>,
}

impl CandidateView {
    pub fn answer_cost(&self, query: usize) -> Option<f64> {
        self.answer_costs
            .binary_search_by_key(&query, |&(q, _)| q)
            .ok()
            .map(|i| self.answer_costs[i].1)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constraints {
    /// Cap on total materialized storage, bytes.
    pub storage_budget: f64,
    /// Cap on total weighted response time.
    #[serde(default)]
    pub max_response_time: Option<f64>,
}

impl Constraints {
    pub fn storage_budget(budget: f64) -> Self {
        Self {
            storage_budget: budget,
            max_response_time: None,
        }
    }

    /// True when `objectives` satisfy every constraint.
    pub fn admits(&self, objectives: &Objectives) -> bool {
        objectives.memory_usage <= self.storage_budget
            && self
                .max_response_time
                .is_none_or(|cap| objectives.response_time <= cap)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Workload {
    pub name: String,
    pub queries: Vec<Query>,
    pub views: Vec<CandidateView>,
    pub constraints: Constraints,
}

#[derive(Serialize, Deserialize)]
struct WorkloadDocument {
    format_version: u32,
    #[serde(flatten)]
    workload: Workload,
}

impl Workload {
    /// Validates and normalizes (sorts each view's answer costs by query id).
    pub fn new(
        name: impl Into<String>,
        queries: Vec<Query>,
        mut views: Vec<CandidateView>,
        constraints: Constraints,
    ) -> Result<Self> {
        for v in &mut views {
            v.answer_costs.sort_by_key(|&(q, _)| q);
        }
        let w = Self {
            name: name.into(),
            queries,
            views,
            constraints,
        };
        w.validate()?;
        Ok(w)
    }

    pub fn num_queries(&self) -> usize {
        self.queries.len()
    }

    pub fn num_views(&self) -> usize {
        self.views.len()
    }

    pub fn total_storage(&self) -> f64 {
        self.views.iter().map(|v| v.storage_size).sum()
    }

    /// Checks every structural invariant, reporting the first violation.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidWorkload(msg));
        if self.queries.is_empty() {
            return bad("workload has no queries".into());
        }
        if self.views.is_empty() {
            return bad("workload has no candidate views".into());
        }
        for (i, q) in self.queries.iter().enumerate() {
            if q.id != i {
                return bad(format!(
                    "query at position {i} has id {}, expected {i}",
                    q.id
                ));
            }
            if !(q.weight.is_finite() && q.weight >= 0.0) {
                return bad(format!("query {i} has invalid weight {}", q.weight));
            }
            if !(q.base_cost.is_finite() && q.base_cost > 0.0) {
                return bad(format!(
                    "query {i} has non-positive base_cost {}",
                    q.base_cost
                ));
            }
        }
        for (i, v) in self.views.iter().enumerate() {
            if v.id != i {
                return bad(format!(
                    "view at position {i} has id {}, expected {i}",
                    v.id
                ));
            }
            if !(v.storage_size.is_finite() && v.storage_size > 0.0) {
                return bad(format!(
                    "view {i} has non-positive storage_size {}",
                    v.storage_size
                ));
            }
            if !(v.maintenance_cost.is_finite() && v.maintenance_cost >= 0.0) {
                return bad(format!(
                    "view {i} has negative maintenance_cost {}",
                    v.maintenance_cost
                ));
            }
            let mut prev: Option<usize> = None;
            for &(q, cost) in &v.answer_costs {
                let Some(query) = self.queries.get(q) else {
                    return bad(format!("view {i} references unknown query id {q}"));
                };
                if prev.is_some_and(|p| p >= q) {
                    return bad(format!(
                        "view {i} lists query {q} twice or out of order in answer_costs"
                    ));
                }
                prev = Some(q);
                if !(cost.is_finite() && cost > 0.0) {
                    return bad(format!(
                        "view {i} has non-positive answer cost {cost} for query {q}"
                    ));
                }
                if cost > query.base_cost {
                    return bad(format!(
                        "view {i} answer cost {cost} for query {q} exceeds its base cost {}",
                        query.base_cost
                    ));
                }
            }
        }
        let c = &self.constraints;
        if !(c.storage_budget.is_finite() && c.storage_budget > 0.0) {
            return bad(format!(
                "storage_budget must be positive, got {}",
                c.storage_budget
            ));
        }
        if let Some(cap) = c.max_response_time {
            if !(cap.is_finite() && cap > 0.0) {
                return bad(format!("max_response_time must be positive, got {cap}"));
            }
        }
        Ok(())
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let doc: WorkloadDocument =
            serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        if doc.format_version != WORKLOAD_FORMAT_VERSION {
            return Err(Error::Parse(format!(
                "unsupported workload format_version {}",
                doc.format_version
            )));
        }
        let w = doc.workload;
        Self::new(w.name, w.queries, w.views, w.constraints)
    }

    pub fn to_json_string(&self) -> String {
        let doc = WorkloadDocument {
            format_version: WORKLOAD_FORMAT_VERSION,
            workload: self.clone(),
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("workload serializes");
        s.push('\n');
        s
    }

    /// Per-query cost of answering under `config`, unweighted.
    pub fn per_query_costs(&self, config: &Chromosome) -> Result<Vec<f64>> {
        self.check_len(config)?;
        let mut costs: Vec<f64> = self.queries.iter().map(|q| q.base_cost).collect();
        for v in config.iter_ones() {
            for &(q, c) in &self.views[v].answer_costs {
                if c < costs[q] {
                    costs[q] = c;
                }
            }
        }
        Ok(costs)
    }

    pub fn compute_objectives(&self, config: &Chromosome) -> Result<Objectives> {
        let costs = self.per_query_costs(config)?;
        Ok(self.objectives_from_costs(config, &costs))
    }

    pub(crate) fn objectives_from_costs(&self, config: &Chromosome, costs: &[f64]) -> Objectives {
        let response_time = self
            .queries
            .iter()
            .zip(costs)
            .map(|(q, c)| q.weight * c)
            .sum();
        let (maintenance_cost, memory_usage) = config
            .iter_ones()
            .map(|v| &self.views[v])
            .fold((0.0, 0.0), |(m, s), v| {
                (m + v.maintenance_cost, s + v.storage_size)
            });
        Objectives {
            response_time,
            maintenance_cost,
            memory_usage,
        }
    }

    pub(crate) fn check_len(&self, config: &Chromosome) -> Result<()> {
        if config.len() != self.num_views() {
            return Err(Error::LengthMismatch {
                expected: self.num_views(),
                actual: config.len(),
            });
        }
        Ok(())
    }
}

pub fn load_workload(path: impl AsRef<Path>) -> Result<Workload> {
    let text = fs::read_to_string(path)?;
    Workload::from_json_str(&text)
}

pub fn save_workload(w: &Workload, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, w.to_json_string())?;
    Ok(())
}

/// Uniform sampling ranges used by [`generate_workload`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CostRanges {
    pub base_cost: (f64, f64),
    pub weight: (f64, f64),
    pub storage_size: (f64, f64),
    pub maintenance_cost: (f64, f64),
    /// Answer cost as a fraction of the query's base cost.
    pub answer_fraction: (f64, f64),
}

impl Default for CostRanges {
    fn default() -> Self {
        Self {
            base_cost: (1.0e3, 1.0e5),
            weight: (0.5, 2.0),
            storage_size: (1.0e6, 1.0e8),
            maintenance_cost: (1.0e3, 2.0e4),
            answer_fraction: (0.05, 0.5),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub num_queries: usize,
    pub num_views: usize,
    /// Probability that a view can answer any given query.
    pub coverage_density: f64,
    pub cost_ranges: CostRanges,
    /// Storage budget as a fraction of the total candidate storage.
    pub budget_fraction: f64,
    pub rng_seed: u64,
}

impl GeneratorSpec {
    pub fn new(num_queries: usize, num_views: usize, coverage_density: f64, rng_seed: u64) -> Self {
        Self {
            num_queries,
            num_views,
            coverage_density,
            cost_ranges: CostRanges::default(),
            budget_fraction: 0.4,
            rng_seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.num_queries == 0 {
            return Err(invalid_param("num_queries must be at least 1"));
        }
        if self.num_views == 0 {
            return Err(invalid_param("num_views must be at least 1"));
        }
        if !(self.coverage_density > 0.0 && self.coverage_density <= 1.0) {
            return Err(invalid_param(format!(
                "coverage_density must be in (0, 1], got {}",
                self.coverage_density
            )));
        }
        if !(self.budget_fraction > 0.0 && self.budget_fraction.is_finite()) {
            return Err(invalid_param(format!(
                "budget_fraction must be positive, got {}",
                self.budget_fraction
            )));
        }
        let r = &self.cost_ranges;
        let check = |name: &str, (lo, hi): (f64, f64), min: f64| {
            if lo.is_finite() && hi.is_finite() && lo >= min && lo <= hi {
                Ok(())
            } else {
                Err(invalid_param(format!(
                    "{name} range ({lo}, {hi}) is invalid"
                )))
            }
        };
        check("base_cost", r.base_cost, f64::MIN_POSITIVE)?;
        check("weight", r.weight, 0.0)?;
        check("storage_size", r.storage_size, f64::MIN_POSITIVE)?;
        check("maintenance_cost", r.maintenance_cost, 0.0)?;
        check("answer_fraction", r.answer_fraction, f64::MIN_POSITIVE)?;
        if r.answer_fraction.1 > 1.0 {
            return Err(invalid_param(
                "answer_fraction upper bound must be at most 1",
            ));
        }
        Ok(())
    }
}

fn uniform<R: Rng>(rng: &mut R, (lo, hi): (f64, f64)) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.gen_range(lo..=hi)
    }
}

/// Seeded synthetic instance with statistically drawn cost parameters.
pub fn generate_workload(spec: &GeneratorSpec) -> Result<Workload> {
    spec.validate()?;
    let r = &spec.cost_ranges;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.rng_seed);

    let queries: Vec<Query> = (0..spec.num_queries)
        .map(|id| Query {
            id,
            weight: uniform(&mut rng, r.weight),
            base_cost: uniform(&mut rng, r.base_cost),
        })
        .collect();

    let views: Vec<CandidateView> = (0..spec.num_views)
        .map(|id| {
            let storage_size = uniform(&mut rng, r.storage_size);
            let maintenance_cost = uniform(&mut rng, r.maintenance_cost);
            let covered = loop {
                let covered: Vec<usize> = (0..spec.num_queries)
                    .filter(|_| rng.gen_bool(spec.coverage_density))
                    .collect();
                if !covered.is_empty() {
                    break covered;
                }
            };
            let answer_costs = covered
                .into_iter()
                .map(|q| {
                    (
                        q,
                        uniform(&mut rng, r.answer_fraction) * queries[q].base_cost,
                    )
                })
                .collect();
            CandidateView {
                id,
                storage_size,
                maintenance_cost,
                answer_costs,
            }
        })
        .collect();

    let total: f64 = views.iter().map(|v| v.storage_size).sum();
    Workload::new(
        format!(
            "synthetic-q{}-v{}-d{}-s{}",
            spec.num_queries, spec.num_views, spec.coverage_density, spec.rng_seed
        ),
        queries,
        views,
        Constraints::storage_budget(spec.budget_fraction * total),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    pub(crate) fn tiny() -> Workload {
        Workload::new(
            "tiny",
            vec![Query {
                id: 0,
                weight: 1.0,
                base_cost: 100.0,
            }],
            vec![CandidateView {
                id: 0,
                storage_size: 50.0,
                maintenance_cost: 5.0,
                answer_costs: vec![(0, 10.0)],
            }],
            Constraints::storage_budget(60.0),
        )
        .unwrap()
    }

    #[test]
    fn minimal_document_loads() {
        let doc = r#"{
            "format_version": 1,
            "name": "min",
            "queries": [{"id": 0, "base_cost": 100.0}],
            "views": [{"id": 0, "storage_size": 50.0, "maintenance_cost": 5.0, "answer_costs": [[0, 10.0]]}],
            "constraints": {"storage_budget": 60.0}
        }"#;
        let w = Workload::from_json_str(doc).unwrap();
        assert_eq!((w.num_queries(), w.num_views()), (1, 1));
        assert_eq!(w.queries[0].weight, 1.0);
        assert_eq!(w.constraints.max_response_time, None);
    }

    #[test]
    fn dangling_query_reference_rejected() {
        let doc = r#"{
            "format_version": 1, "name": "bad",
            "queries": [{"id": 0, "base_cost": 1.0}, {"id": 1, "base_cost": 1.0}, {"id": 2, "base_cost": 1.0}],
            "views": [{"id": 0, "storage_size": 1.0, "maintenance_cost": 1.0, "answer_costs": [[5, 0.5]]}],
            "constraints": {"storage_budget": 1.0}
        }"#;
        let err = Workload::from_json_str(doc).unwrap_err();
        assert!(
            matches!(err, Error::InvalidWorkload(ref m) if m.contains("unknown query id 5")),
            "{err}"
        );
    }

    #[test]
    fn answer_cost_above_base_rejected() {
        let mut w = tiny();
        w.views[0].answer_costs = vec![(0, 150.0)];
        let err = w.validate().unwrap_err();
        assert!(err.to_string().contains("exceeds its base cost"));
    }

    #[test]
    fn malformed_document_is_parse_error() {
        assert!(matches!(
            Workload::from_json_str("{ nope"),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn structural_errors() {
        let mut w = tiny();
        w.queries[0].id = 3;
        assert!(w.validate().is_err());
        let mut w = tiny();
        w.views.clear();
        assert!(w.validate().is_err());
        let mut w = tiny();
        w.constraints.storage_budget = 0.0;
        assert!(w.validate().is_err());
        let mut w = tiny();
        w.constraints.max_response_time = Some(-1.0);
        assert!(w.validate().is_err());
    }

    #[test]
    fn objectives_examples() {
        let w = tiny();
        let empty = w.compute_objectives(&Chromosome::zeros(1)).unwrap();
        assert_eq!(
            (
                empty.response_time,
                empty.maintenance_cost,
                empty.memory_usage
            ),
            (100.0, 0.0, 0.0)
        );
        let full = w.compute_objectives(&Chromosome::ones(1)).unwrap();
        assert_eq!(
            (full.response_time, full.maintenance_cost, full.memory_usage),
            (10.0, 5.0, 50.0)
        );
        assert!(matches!(
            w.compute_objectives(&Chromosome::zeros(2)),
            Err(Error::LengthMismatch {
                expected: 1,
                actual: 2
            })
        ));
    }

    /// Straight brute force over the min expression, independent of the
    /// incremental evaluation path.
    fn brute_objectives(w: &Workload, c: &Chromosome) -> (f64, f64, f64) {
        let mut rt = 0.0;
        for q in &w.queries {
            let mut best = q.base_cost;
            for v in &w.views {
                if c.get(v.id) {
                    for &(qq, cost) in &v.answer_costs {
                        if qq == q.id && cost < best {
                            best = cost;
                        }
                    }
                }
            }
            rt += q.weight * best;
        }
        let mut mc = 0.0;
        let mut mem = 0.0;
        for v in &w.views {
            if c.get(v.id) {
                mc += v.maintenance_cost;
                mem += v.storage_size;
            }
        }
        (rt, mc, mem)
    }

    #[test]
    fn objectives_match_brute_force_on_small_instances() {
        for seed in 0..10 {
            let w = generate_workload(&GeneratorSpec::new(3, 3, 0.6, seed)).unwrap();
            for mask in 0..8u32 {
                let c = Chromosome::from_bits((0..3).map(|i| mask >> i & 1 == 1).collect());
                let o = w.compute_objectives(&c).unwrap();
                let (rt, mc, mem) = brute_objectives(&w, &c);
                assert!((o.response_time - rt).abs() <= 1e-12 * rt);
                assert!((o.maintenance_cost - mc).abs() <= 1e-12 * mc.max(1.0));
                assert!((o.memory_usage - mem).abs() <= 1e-12 * mem.max(1.0));
            }
        }
    }

    #[test]
    fn generator_is_deterministic_and_sized() {
        let spec = GeneratorSpec::new(22, 40, 0.3, 7);
        let a = generate_workload(&spec).unwrap();
        let b = generate_workload(&spec).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.num_queries(), 22);
        assert_eq!(a.num_views(), 40);
        assert!((a.constraints.storage_budget - 0.4 * a.total_storage()).abs() < 1e-6);
        for v in &a.views {
            assert!(!v.answer_costs.is_empty());
            for &(q, c) in &v.answer_costs {
                let base = a.queries[q].base_cost;
                assert!(c >= 0.05 * base * (1.0 - 1e-12) && c <= 0.5 * base * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn full_density_covers_everything() {
        let w = generate_workload(&GeneratorSpec::new(6, 5, 1.0, 1)).unwrap();
        assert!(w.views.iter().all(|v| v.answer_costs.len() == 6));
    }

    #[test]
    fn generator_rejects_bad_specs() {
        assert!(generate_workload(&GeneratorSpec::new(0, 4, 0.3, 0)).is_err());
        assert!(generate_workload(&GeneratorSpec::new(4, 0, 0.3, 0)).is_err());
        assert!(generate_workload(&GeneratorSpec::new(4, 4, 0.0, 0)).is_err());
        assert!(generate_workload(&GeneratorSpec::new(4, 4, 1.5, 0)).is_err());
    }

    #[test]
    fn json_roundtrip() {
        for seed in 0..5 {
            let w = generate_workload(&GeneratorSpec::new(22, 40, 0.3, seed)).unwrap();
            assert_eq!(Workload::from_json_str(&w.to_json_string()).unwrap(), w);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn adding_a_view_is_monotone(seed in 0u64..1000, mask in any::<u16>(), flip in 0usize..12) {
            let w = generate_workload(&GeneratorSpec::new(8, 12, 0.3, seed)).unwrap();
            let mut c = Chromosome::from_bits((0..12).map(|i| mask >> i & 1 == 1).collect());
            c.set(flip, false);
            let before = w.compute_objectives(&c).unwrap();
            c.set(flip, true);
            let after = w.compute_objectives(&c).unwrap();
            let empty = w.compute_objectives(&Chromosome::zeros(12)).unwrap();
            prop_assert!(after.response_time <= before.response_time);
            prop_assert!(after.maintenance_cost >= before.maintenance_cost);
            prop_assert!(after.memory_usage >= before.memory_usage);
            prop_assert!(after.response_time <= empty.response_time);
        }
    }
}
