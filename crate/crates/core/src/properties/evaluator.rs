use crate::contingency::{ContingencyTable, TableSpace, TransformKind};
use crate::error::Result;
use crate::measures::{descriptor, evaluate_f64, RuleContext};

use super::compare::{above, Relation, Witness};
use super::{EvaluationConfig, Method, PropertyId, Verdict};

/// Shared state for deciding properties at one bound.
#[derive(Debug, Clone)]
pub struct PropertyEngine {
    cfg: EvaluationConfig,
    space: TableSpace,
    tables: Vec<ContingencyTable>,
    /// Indices of tables with all four margins non-empty.
    domain: Vec<usize>,
    ctx: RuleContext,
    p19_profiles: Vec<ContingencyTable>,
}

impl PropertyEngine {
    pub fn new(cfg: EvaluationConfig) -> Result<Self> {
        cfg.validate()?;
        let space = TableSpace::new(cfg.n_max);
        let tables: Vec<ContingencyTable> = space.tables().collect();
        let domain: Vec<usize> = tables
            .iter()
            .enumerate()
            .filter(|(_, t)| t.has_nonempty_margins())
            .map(|(i, _)| i)
            .collect();
        let ctx = RuleContext::new(domain.iter().map(|&i| tables[i]).collect())?;
        let p19_profiles = domain
            .iter()
            .map(|&i| tables[i])
            .filter(|t| {
                t.reduced() == *t && t.classify_state().map(|s| s.attraction).unwrap_or(false)
            })
            .collect();
        Ok(Self {
            cfg,
            space,
            tables,
            domain,
            ctx,
            p19_profiles,
        })
    }

    pub fn config(&self) -> &EvaluationConfig {
        &self.cfg
    }

    /// Context used for PDI: every bounded table with non-empty margins.
    pub fn context(&self) -> &RuleContext {
        &self.ctx
    }

    pub fn evaluate_measure(&self, measure: u8) -> Result<Vec<Verdict>> {
        let row = self.row(measure)?;
        Ok(PropertyId::all().map(|p| row.decide(p)).collect())
    }

    pub fn evaluate(&self, measure: u8, property: PropertyId) -> Result<Verdict> {
        Ok(self.row(measure)?.decide(property))
    }

    fn row(&self, measure: u8) -> Result<Row<'_>> {
        descriptor(measure)?;
        let values = self
            .tables
            .iter()
            .map(|t| evaluate_f64(measure, t, &self.cfg.params, Some(&self.ctx)))
            .collect();
        Ok(Row {
            engine: self,
            id: measure,
            values,
        })
    }
}

/// Decides one property from scratch.
pub fn evaluate_property(
    measure: u8,
    property: PropertyId,
    cfg: &EvaluationConfig,
) -> Result<Verdict> {
    PropertyEngine::new(cfg.clone())?.evaluate(measure, property)
}

struct Row<'a> {
    engine: &'a PropertyEngine,
    id: u8,
    values: Vec<f64>,
}

impl Row<'_> {
    fn tol(&self) -> f64 {
        self.engine.cfg.tol
    }

    fn bound(&self) -> u64 {
        self.engine.cfg.n_max
    }

    fn m(&self, t: &ContingencyTable) -> f64 {
        match self.engine.space.index_of(t) {
            Some(i) => self.values[i],
            None => evaluate_f64(self.id, t, &self.engine.cfg.params, Some(&self.engine.ctx)),
        }
    }

    fn domain(&self) -> impl Iterator<Item = (ContingencyTable, f64)> + '_ {
        self.engine
            .domain
            .iter()
            .map(|&i| (self.engine.tables[i], self.values[i]))
    }

    fn verdict(&self, p: PropertyId, value: u8) -> Verdict {
        Verdict::computed(self.id, p, self.bound(), value)
    }

    fn decide(&self, p: PropertyId) -> Verdict {
        match p.index() {
            1 => self.existential(p, TransformKind::Swap, Relation::Differ, |_| true),
            2 => self.existential(p, TransformKind::NegateConclusion, Relation::Differ, |_| {
                true
            }),
            3 => self.universal(p, TransformKind::Contrapositive, Relation::Differ, |t| {
                t.n_xny() == 0
            }),
            4 => self.increasing_with_examples(p),
            5 => self.increasing_with_size(p),
            6 => self.decreasing_with_consequent(p),
            7 => self.fixed_value(p, |t| t.is_independent()),
            8 => self.fixed_value(p, |t| t.n_xny() == 0),
            9 => self.fixed_value(p, |t| 2 * t.n_xy() == t.n_x()),
            10 => self.separated(p, true),
            11 => self.separated(p, false),
            12 => self.counter_example_tolerance(p),
            13 => self.expansion_invariance(p),
            14 => self.universal(
                p,
                TransformKind::NegatePremise,
                Relation::NotNegated,
                |_| true,
            ),
            15 => self.universal(
                p,
                TransformKind::NegateConclusion,
                Relation::NotNegated,
                |_| true,
            ),
            16 => self.universal(p, TransformKind::BothNegated, Relation::Differ, |_| true),
            17 => self.declared_p17(p),
            18 => self.statistical(p),
            _ => self.discriminant(p),
        }
    }

    fn first_violation(
        &self,
        kind: TransformKind,
        rel: Relation,
        keep: impl Fn(&ContingencyTable) -> bool,
    ) -> Option<Witness> {
        let tol = self.tol();
        self.domain().filter(|(t, _)| keep(t)).find_map(|(t, x)| {
            let u = t.transform(kind).ok()?;
            let w = Witness::new(t, u, rel);
            w.holds_for(x, self.m(&u), tol).then_some(w)
        })
    }

    /// 1 when some table breaks the identity.
    fn existential(
        &self,
        p: PropertyId,
        kind: TransformKind,
        rel: Relation,
        keep: impl Fn(&ContingencyTable) -> bool,
    ) -> Verdict {
        match self.first_violation(kind, rel, keep) {
            Some(w) => self.verdict(p, 1).with_witness(w),
            None => self.verdict(p, 0),
        }
    }

    /// 1 when every table satisfies the identity.
    fn universal(
        &self,
        p: PropertyId,
        kind: TransformKind,
        rel: Relation,
        keep: impl Fn(&ContingencyTable) -> bool,
    ) -> Verdict {
        match self.first_violation(kind, rel, keep) {
            Some(w) => self.verdict(p, 0).with_witness(w),
            None => self.verdict(p, 1),
        }
    }

    /// Nondecreasing along each sequence, strictly somewhere.
    fn monotone<I, S>(&self, p: PropertyId, sequences: I) -> Verdict
    where
        I: Iterator<Item = S>,
        S: Iterator<Item = ContingencyTable>,
    {
        let tol = self.tol();
        let mut strict = false;
        for seq in sequences {
            let mut prev: Option<(ContingencyTable, f64)> = None;
            for t in seq {
                let v = self.m(&t);
                if v.is_nan() {
                    continue;
                }
                if let Some((pt, pv)) = prev {
                    if above(pv, v, tol) {
                        return self.verdict(p, 0).with_witness(Witness::new(
                            pt,
                            t,
                            Relation::Exceeds,
                        ));
                    }
                    strict |= above(v, pv, tol);
                }
                prev = Some((t, v));
            }
        }
        let mut v = self.verdict(p, u8::from(strict));
        if !strict {
            v.note = Some("never strictly increasing within the bound".into());
        }
        v
    }

    fn increasing_with_examples(&self, p: PropertyId) -> Verdict {
        self.monotone(
            p,
            marginal_families(self.bound()).map(|(n, x, y)| {
                let lo = (x + y).saturating_sub(n);
                (lo..=x.min(y)).map(move |a| table_from_margins(n, x, y, a))
            }),
        )
    }

    fn increasing_with_size(&self, p: PropertyId) -> Verdict {
        let n_max = self.bound();
        let families = (0..=n_max).flat_map(move |a| {
            (0..=n_max - a).flat_map(move |b| (0..=n_max - a - b).map(move |c| (a, b, c)))
        });
        self.monotone(
            p,
            families.map(move |(a, b, c)| {
                (0..=n_max - a - b - c)
                    .map(move |d| ContingencyTable::from_counts([a, b, c, d]))
                    .filter(|t| t.n() >= 1 && t.has_nonempty_margins())
            }),
        )
    }

    /// All pairs with equal `(n_xy, n_xny)` and growing `n_nxy`, `n_nxny` free.
    fn decreasing_with_consequent(&self, p: PropertyId) -> Verdict {
        let tol = self.tol();
        let n_max = self.bound();
        let mut strict = false;
        for a in 0..=n_max {
            for b in 0..=n_max - a {
                // per c: (min, argmin, max, argmax) over d
                let mut stats: Vec<Option<Extremes>> = Vec::new();
                for c in 0..=n_max - a - b {
                    let mut e: Option<Extremes> = None;
                    for d in 0..=n_max - a - b - c {
                        let t = ContingencyTable::from_counts([a, b, c, d]);
                        if !t.has_nonempty_margins() {
                            continue;
                        }
                        let v = self.m(&t);
                        if v.is_nan() {
                            continue;
                        }
                        e = Some(match e {
                            None => Extremes::new(t, v),
                            Some(e) => e.push(t, v),
                        });
                    }
                    stats.push(e);
                }
                // suffix extremes over c2 > c1
                let mut suffix: Option<Extremes> = None;
                for c1 in (0..stats.len()).rev() {
                    if let (Some(lo), Some(sfx)) = (&stats[c1], &suffix) {
                        if above(sfx.max, lo.min, tol) {
                            return self.verdict(p, 0).with_witness(Witness::new(
                                sfx.argmax,
                                lo.argmin,
                                Relation::Exceeds,
                            ));
                        }
                        strict |= above(lo.max, sfx.min, tol);
                    }
                    if let Some(cur) = stats[c1] {
                        suffix = Some(match suffix {
                            None => cur,
                            Some(s) => s.merge(cur),
                        });
                    }
                }
            }
        }
        self.verdict(p, u8::from(strict))
    }

    fn fixed_value(&self, p: PropertyId, keep: impl Fn(&ContingencyTable) -> bool) -> Verdict {
        let tol = self.tol();
        let mut defined: Option<Extremes> = None;
        let mut undefined: Option<ContingencyTable> = None;
        let mut seen = 0usize;
        for (t, v) in self.domain().filter(|(t, _)| keep(t)) {
            seen += 1;
            if v.is_nan() {
                undefined.get_or_insert(t);
                continue;
            }
            defined = Some(match defined {
                None => Extremes::new(t, v),
                Some(e) => e.push(t, v),
            });
        }
        let Some(e) = defined else {
            let msg = if seen == 0 {
                "no table of this state within the bound"
            } else {
                "measure undefined on every table of this state"
            };
            return Verdict::failed(self.id, p, self.bound(), msg.into());
        };
        if let Some(u) = undefined {
            let mut v =
                self.verdict(p, 0)
                    .with_witness(Witness::new(e.argmin, u, Relation::Differ));
            v.note = Some("undefined on part of the state".into());
            return v;
        }
        if !e.min.is_finite() || !e.max.is_finite() {
            let mut v = self.verdict(p, 0);
            if e.min != e.max {
                v.witness = Some(Witness::new(e.argmin, e.argmax, Relation::Differ));
            } else {
                v.note = Some("constant but infinite on the state".into());
            }
            return v;
        }
        if e.max - e.min <= tol {
            let mut v = self.verdict(p, 1);
            v.landmark = Some(0.5 * (e.min + e.max));
            v
        } else {
            self.verdict(p, 0)
                .with_witness(Witness::new(e.argmin, e.argmax, Relation::Differ))
        }
    }

    /// Attraction (or repulsion) values separated from the rest.
    fn separated(&self, p: PropertyId, attraction: bool) -> Verdict {
        let independence_fixed = self
            .fixed_value(PropertyId(7), |t| t.is_independent())
            .value
            == Some(1);
        let mut target: Option<Extremes> = None;
        let mut rest: Option<Extremes> = None;
        for (t, v) in self.domain() {
            if v.is_nan() {
                continue;
            }
            let Ok(s) = t.classify_state() else { continue };
            let in_target = if attraction {
                s.attraction
            } else {
                s.repulsion
            };
            let in_rest = if independence_fixed {
                s.independence
            } else {
                !in_target
            };
            let slot = if in_target {
                &mut target
            } else if in_rest {
                &mut rest
            } else {
                continue;
            };
            *slot = Some(match *slot {
                None => Extremes::new(t, v),
                Some(e) => e.push(t, v),
            });
        }
        let (Some(target), Some(rest)) = (target, rest) else {
            return Verdict::failed(
                self.id,
                p,
                self.bound(),
                "measure undefined on a whole comparison set".into(),
            );
        };
        let tol = self.tol();
        let (ok, w) = if attraction {
            (
                above(target.min, rest.max, tol),
                Witness::new(target.argmin, rest.argmax, Relation::AtMost),
            )
        } else {
            (
                above(rest.min, target.max, tol),
                Witness::new(rest.argmin, target.argmax, Relation::AtMost),
            )
        };
        let mut v = if ok {
            self.verdict(p, 1)
        } else {
            self.verdict(p, 0).with_witness(w)
        };
        v.note = Some(if independence_fixed {
            "separated from the independence value".into()
        } else {
            "separated from all other states".into()
        });
        v
    }

    fn counter_example_tolerance(&self, p: PropertyId) -> Verdict {
        let tol = self.tol();
        let min_conf = self.engine.cfg.min_conf;
        let (mut concave, mut convex, mut triples) = (true, true, 0usize);
        for (n, x, y) in marginal_families(self.bound()) {
            let lo = (x + y).saturating_sub(n);
            let floor = (min_conf * x as f64).ceil() as u64;
            let start = lo.max(floor);
            let hi = x.min(y);
            if start > hi {
                continue;
            }
            let vals: Vec<f64> = (start..=hi)
                .map(|a| self.m(&table_from_margins(n, x, y, a)))
                .collect();
            for w in vals.windows(3) {
                if !w.iter().all(|v| v.is_finite()) {
                    continue;
                }
                triples += 1;
                let d2 = w[2] - 2.0 * w[1] + w[0];
                concave &= d2 <= tol;
                convex &= d2 >= -tol;
            }
        }
        if triples == 0 {
            return Verdict::failed(
                self.id,
                p,
                self.bound(),
                "no finite triple above the confidence floor".into(),
            );
        }
        let (value, shape) = match (concave, convex) {
            (true, true) => (1, "linear"),
            (true, false) => (2, "concave"),
            (false, true) => (0, "convex"),
            (false, false) => (1, "mixed"),
        };
        let mut v = self.verdict(p, value);
        v.note = Some(shape.into());
        v
    }

    fn expansion_invariance(&self, p: PropertyId) -> Verdict {
        let k_max = self.engine.cfg.k_max;
        let kinds: Vec<TransformKind> = (1..=k_max)
            .flat_map(|k1| (1..=k_max).map(move |k2| (k1, k2)))
            .filter(|&(k1, k2)| (k1, k2) != (1, 1))
            .flat_map(|(k1, k2)| {
                [
                    TransformKind::RowScale(k1, k2),
                    TransformKind::ColScale(k1, k2),
                ]
            })
            .collect();
        for kind in kinds {
            if let Some(w) = self.first_violation(kind, Relation::Differ, |_| true) {
                return self.verdict(p, 0).with_witness(w);
            }
        }
        self.verdict(p, 1)
    }

    fn declared_p17(&self, p: PropertyId) -> Verdict {
        let d = descriptor(self.id).expect("registered measure");
        let mut v = self.verdict(p, u8::from(d.declared_p17));
        v.method = Method::Declared;
        v
    }

    fn statistical(&self, p: PropertyId) -> Verdict {
        for k in 2..=self.engine.cfg.k_max {
            if let Some(w) =
                self.first_violation(TransformKind::UniformScale(k), Relation::Differ, |_| true)
            {
                return self.verdict(p, 1).with_witness(w);
            }
        }
        self.verdict(p, 0)
    }

    fn discriminant(&self, p: PropertyId) -> Verdict {
        let d = descriptor(self.id).expect("registered measure");
        if let Some(value) = d.declared_p19_override {
            let mut v = self.verdict(p, value);
            v.method = Method::Declared;
            v.note = Some("declared override".into());
            return v;
        }
        let scale = self.engine.cfg.p19_top_scale();
        let sd = self.dispersion(scale);
        let Some(sd) = sd else {
            return Verdict::failed(
                self.id,
                p,
                self.bound(),
                "no finite value on scaled attraction profiles".into(),
            );
        };
        let value = u8::from(sd >= self.engine.cfg.p19_dispersion_floor);
        let mut v = self.verdict(p, value);
        v.note = Some(format!("dispersion {sd:.6e} at scale {scale}"));
        v
    }

    /// Population standard deviation over scaled attraction profiles.
    pub(crate) fn dispersion(&self, scale: u64) -> Option<f64> {
        let vals: Vec<f64> = self
            .engine
            .p19_profiles
            .iter()
            .filter_map(|t| t.transform(TransformKind::UniformScale(scale)).ok())
            .map(|t| self.m(&t))
            .filter(|v| v.is_finite())
            .collect();
        population_sd(&vals)
    }
}

fn population_sd(vals: &[f64]) -> Option<f64> {
    if vals.is_empty() {
        return None;
    }
    let n = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / n;
    Some((vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n).sqrt())
}

#[derive(Debug, Clone, Copy)]
struct Extremes {
    min: f64,
    argmin: ContingencyTable,
    max: f64,
    argmax: ContingencyTable,
}

impl Extremes {
    fn new(t: ContingencyTable, v: f64) -> Self {
        Self {
            min: v,
            argmin: t,
            max: v,
            argmax: t,
        }
    }

    /// Keeps the earliest table on ties.
    fn push(self, t: ContingencyTable, v: f64) -> Self {
        self.merge(Self::new(t, v))
    }

    fn merge(self, o: Self) -> Self {
        let (min, argmin) = if o.min < self.min {
            (o.min, o.argmin)
        } else {
            (self.min, self.argmin)
        };
        let (max, argmax) = if o.max > self.max {
            (o.max, o.argmax)
        } else {
            (self.max, self.argmax)
        };
        Self {
            min,
            argmin,
            max,
            argmax,
        }
    }
}

/// `(n, n_X, n_Y)` with every margin non-empty.
fn marginal_families(n_max: u64) -> impl Iterator<Item = (u64, u64, u64)> {
    (2..=n_max).flat_map(|n| (1..n).flat_map(move |x| (1..n).map(move |y| (n, x, y))))
}

fn table_from_margins(n: u64, x: u64, y: u64, a: u64) -> ContingencyTable {
    ContingencyTable::from_counts([a, x - a, y - a, n + a - x - y])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn engine() -> PropertyEngine {
        PropertyEngine::new(EvaluationConfig::with_n_max(12)).unwrap()
    }

    fn value(e: &PropertyEngine, m: u8, p: u8) -> Option<u8> {
        e.evaluate(m, PropertyId::new(p).unwrap()).unwrap().value
    }

    #[test]
    fn symmetry() {
        let e = engine();
        assert_eq!(value(&e, 3, 1), Some(1));
        assert_eq!(value(&e, 54, 1), Some(0));
        let v = e.evaluate(3, PropertyId::new(1).unwrap()).unwrap();
        let w = v.witness.unwrap();
        assert!(w.reproduce(3, &e.cfg.params, None, e.cfg.tol));
    }

    #[test]
    fn loevinger_implication_landmark() {
        let e = engine();
        let v = e.evaluate(18, PropertyId::new(8).unwrap()).unwrap();
        assert_eq!(v.value, Some(1));
        assert!((v.landmark.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn jaccard_not_fixed_at_independence() {
        let e = engine();
        let v = e.evaluate(35, PropertyId::new(7).unwrap()).unwrap();
        assert_eq!(v.value, Some(0));
        assert!(v.witness.is_some());
    }

    #[test]
    fn support_is_linear_and_descriptive() {
        let e = engine();
        assert_eq!(value(&e, 54, 12), Some(1));
        assert_eq!(value(&e, 54, 18), Some(0));
        assert_eq!(value(&e, 45, 18), Some(1));
    }

    #[test]
    fn declared_cells() {
        let e = engine();
        let v = e.evaluate(30, PropertyId::new(17).unwrap()).unwrap();
        assert_eq!((v.value, v.method), (Some(1), Method::Declared));
    }

    #[test]
    fn families_cover_feasible_range() {
        let fams: Vec<_> = marginal_families(3).collect();
        assert_eq!(
            fams,
            [(2, 1, 1), (3, 1, 1), (3, 1, 2), (3, 2, 1), (3, 2, 2)]
        );
        let t = table_from_margins(10, 4, 6, 3);
        assert_eq!((t.n(), t.n_x(), t.n_y()), (10, 4, 6));
    }
}
