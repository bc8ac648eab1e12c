//! Streaming deficiency scan in floating point.
//!
//! The exact engine keeps every capital as a rational, which is the
//! reference but costs a big-integer multiplication per strategy and step.
//! For long prefixes this module replays the same products in `f64`.
//! Each weighted capital is held as `m · 2^e` with `m` kept in
//! `[2^-512, 2^512]` and `e` a multiple of 512, so neither overflow nor
//! underflow loses a strategy. Strategies whose multiplier only depends on
//! depth are compiled into per-phase factor tables and grouped by the
//! phases on which they bet; a group that does not bet at a step is skipped.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::Result;
use crate::forecast::ForecastingSystem;
use crate::martingale::MultiplierProcess;
use crate::rational::Rational;

use super::battery::check_battery;
use super::SequencePrefix;

const SPAN: i32 = 512;
const DEAD: i32 = i32::MIN / 2;

fn hi() -> f64 {
    2f64.powi(SPAN)
}

fn lo() -> f64 {
    2f64.powi(-SPAN)
}

struct Group {
    period: usize,
    active: Vec<bool>,
    start: usize,
    len: usize,
    /// `factors[((phase * len) + j) * k + x]`.
    factors: Vec<f64>,
    /// Active steps after which a member may have left the normal range
    /// when started inside `[2^-SPAN, 2^SPAN]`.
    check_every: usize,
}

/// A battery prepared for repeated scans.
pub struct CompiledBattery {
    k: usize,
    labels: Vec<String>,
    log2_weights: Vec<f64>,
    /// Strategy index at each state position.
    order: Vec<usize>,
    groups: Vec<Group>,
    dynamic: Vec<MultiplierProcess>,
    dynamic_start: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct StrategyScan {
    pub id: usize,
    pub label: String,
    pub max_log2: f64,
    pub argmax_step: usize,
    pub final_log2: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanResult {
    pub length: usize,
    /// `log2` of the running maximum of the mixture capital.
    pub deficiency_bits: f64,
    pub mixture_argmax_step: usize,
    pub final_mixture_log2: f64,
    pub strategies: Vec<StrategyScan>,
}

/// `log2` of the mixture weight `2^-(i+1) / (1 - 2^-n)`.
fn log2_weight(i: usize, n: usize) -> f64 {
    let z = if n >= 60 { 0.0 } else { (-(2f64.powi(-(n as i32)))).ln_1p() / std::f64::consts::LN_2 };
    -((i + 1) as f64) - z
}

/// Period, active pattern, member ids and per-member factor rows.
type Pending = (usize, Vec<bool>, Vec<usize>, Vec<Vec<f64>>);

impl CompiledBattery {
    pub fn new(battery: &[MultiplierProcess]) -> Result<Self> {
        if battery.is_empty() {
            return Err(crate::error::Error::EmptyBattery);
        }
        let space = battery[0].space().clone();
        for d in battery {
            space.ensure_same(d.space())?;
        }
        let k = space.size();
        let mut keys: HashMap<(usize, Vec<bool>), usize> = HashMap::new();
        let mut pending: Vec<Pending> = Vec::new();
        let mut dynamic_ids = Vec::new();
        for (i, d) in battery.iter().enumerate() {
            let Some(rows) = d.periodic() else {
                dynamic_ids.push(i);
                continue;
            };
            let table: Vec<Vec<f64>> = rows.iter().map(|g| g.to_f64()).collect();
            if table.iter().flatten().any(|&f| !(f.is_finite() && f < 2f64.powi(256))) {
                dynamic_ids.push(i);
                continue;
            }
            let active: Vec<bool> = rows.iter().map(|g| !g.values().iter().all(Rational::is_one)).collect();
            let key = (rows.len(), active.clone());
            let gi = *keys.entry(key).or_insert_with(|| {
                pending.push((rows.len(), active, Vec::new(), Vec::new()));
                pending.len() - 1
            });
            pending[gi].2.push(i);
            pending[gi].3.push(table.concat());
        }
        let mut order = Vec::with_capacity(battery.len());
        let mut groups = Vec::new();
        for (period, active, members, tables) in pending {
            let len = members.len();
            let mut factors = vec![0.0; period * len * k];
            for (j, t) in tables.iter().enumerate() {
                for p in 0..period {
                    for x in 0..k {
                        factors[(p * len + j) * k + x] = t[p * k + x];
                    }
                }
            }
            let spread = factors.iter().filter(|&&f| f > 0.0).map(|f| f.log2().abs()).fold(0.0, f64::max);
            let check_every = if spread == 0.0 { usize::MAX } else { ((480.0 / spread).floor() as usize).max(1) };
            groups.push(Group { period, active, start: order.len(), len, factors, check_every });
            order.extend(members);
        }
        let dynamic_start = order.len();
        order.extend(&dynamic_ids);
        Ok(CompiledBattery {
            k,
            labels: battery.iter().map(|d| d.label()).collect(),
            log2_weights: (0..battery.len()).map(|i| log2_weight(i, battery.len())).collect(),
            order,
            groups,
            dynamic: dynamic_ids.iter().map(|&i| battery[i].clone()).collect(),
            dynamic_start,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn alphabet_size(&self) -> usize {
        self.k
    }

    /// Replays the battery along `symbols`.
    pub fn scan(&self, symbols: &[usize]) -> ScanResult {
        let n_pos = self.order.len();
        let (hi, lo) = (hi(), lo());
        let mut m = vec![0.0f64; n_pos];
        let mut e = vec![0i32; n_pos];
        for (pos, &i) in self.order.iter().enumerate() {
            let lw = self.log2_weights[i];
            let ex = (lw / SPAN as f64).floor() as i32 * SPAN;
            e[pos] = ex;
            m[pos] = (lw - ex as f64).exp2();
        }
        let mut reference = e.iter().copied().max().unwrap_or(0);
        let mut sc: Vec<f64> = e.iter().map(|&ex| scale(ex, reference)).collect();
        let mut best_m = m.clone();
        let mut best_e = e.clone();
        let mut best_n = vec![0usize; n_pos];
        let group_sum = |g: &Group, m: &[f64], sc: &[f64]| (g.start..g.start + g.len).map(|p| m[p] * sc[p]).sum::<f64>();
        let mut gsum: Vec<f64> = self.groups.iter().map(|g| group_sum(g, &m, &sc)).collect();
        let mut dyn_sum: f64 = (self.dynamic_start..n_pos).map(|p| m[p] * sc[p]).sum();
        let (mut best_total, mut best_ref, mut best_step) = (1.0f64, 0i32, 0usize);
        let k = self.k;

        for (n, &x) in symbols.iter().enumerate() {
            let mut rescale = false;
            for (gi, g) in self.groups.iter().enumerate() {
                let phase = n % g.period;
                if !g.active[phase] {
                    continue;
                }
                let base = phase * g.len;
                let mut sum = 0.0;
                for j in 0..g.len {
                    let pos = g.start + j;
                    let f = g.factors[(base + j) * k + x];
                    let mut mv = m[pos] * f;
                    if !(mv >= lo && mv <= hi) {
                        rescale |= renormalize(&mut mv, &mut e[pos], reference, &mut sc[pos]);
                    }
                    m[pos] = mv;
                    track_max(mv, e[pos], &mut best_m[pos], &mut best_e[pos], &mut best_n[pos], n + 1);
                    sum += mv * sc[pos];
                }
                gsum[gi] = sum;
            }
            if !self.dynamic.is_empty() {
                let mut sum = 0.0;
                for (j, d) in self.dynamic.iter().enumerate() {
                    let pos = self.dynamic_start + j;
                    let mut mv = m[pos];
                    if e[pos] != DEAD {
                        let f = d.factor(&symbols[..n], x);
                        if !f.is_one() {
                            let (fm, fe) = split_factor(&f);
                            mv *= fm;
                            e[pos] += fe;
                            if fe != 0 {
                                rescale = true;
                            }
                            if !(mv >= lo && mv <= hi) {
                                rescale |= renormalize(&mut mv, &mut e[pos], reference, &mut sc[pos]);
                            }
                        }
                    }
                    m[pos] = mv;
                    track_max(mv, e[pos], &mut best_m[pos], &mut best_e[pos], &mut best_n[pos], n + 1);
                    sum += mv * sc[pos];
                }
                dyn_sum = sum;
            }
            if rescale {
                let live = e.iter().copied().filter(|&ex| ex != DEAD).max();
                reference = reference.max(live.unwrap_or(reference));
                for p in 0..n_pos {
                    sc[p] = scale(e[p], reference);
                }
                for (gi, g) in self.groups.iter().enumerate() {
                    gsum[gi] = group_sum(g, &m, &sc);
                }
                dyn_sum = (self.dynamic_start..n_pos).map(|p| m[p] * sc[p]).sum();
            }
            let total: f64 = gsum.iter().sum::<f64>() + dyn_sum;
            let better = if reference == best_ref { total > best_total } else { total * 2f64.powi(reference - best_ref) > best_total };
            if better {
                best_total = total;
                best_ref = reference;
                best_step = n + 1;
            }
        }

        let mut strategies: Vec<StrategyScan> = self
            .order
            .iter()
            .enumerate()
            .map(|(pos, &i)| StrategyScan {
                id: i,
                label: self.labels[i].clone(),
                max_log2: value_log2(best_m[pos], best_e[pos]) - self.log2_weights[i],
                argmax_step: best_n[pos],
                final_log2: value_log2(m[pos], e[pos]) - self.log2_weights[i],
            })
            .collect();
        strategies.sort_by_key(|s| s.id);
        let total: f64 = gsum.iter().sum::<f64>() + dyn_sum;
        let final_mixture_log2 = if total > 0.0 && total.is_normal() {
            total.log2() + reference as f64
        } else {
            log_sum_exp2((0..n_pos).map(|p| value_log2(m[p], e[p])))
        };
        ScanResult {
            length: symbols.len(),
            deficiency_bits: (best_total.log2() + best_ref as f64).max(0.0),
            mixture_argmax_step: best_step,
            final_mixture_log2,
            strategies,
        }
    }
}

impl CompiledBattery {
    /// Only the deficiency of [`CompiledBattery::scan`], without per-strategy
    /// statistics. Members of depth-only groups are range-checked every
    /// `check_every` active steps instead of every step, which keeps the
    /// inner loop free of branches.
    pub fn deficiency_bits(&self, symbols: &[usize]) -> f64 {
        let n_pos = self.order.len();
        let (hi, lo) = (hi(), lo());
        let mut m = vec![0.0f64; n_pos];
        let mut e = vec![0i32; n_pos];
        for (pos, &i) in self.order.iter().enumerate() {
            let lw = self.log2_weights[i];
            let ex = (lw / SPAN as f64).floor() as i32 * SPAN;
            e[pos] = ex;
            m[pos] = (lw - ex as f64).exp2();
        }
        let mut reference = e.iter().copied().max().unwrap_or(0);
        let mut sc: Vec<f64> = e.iter().map(|&ex| scale(ex, reference)).collect();
        let group_sum = |g: &Group, m: &[f64], sc: &[f64]| (g.start..g.start + g.len).map(|p| m[p] * sc[p]).sum::<f64>();
        let mut gsum: Vec<f64> = self.groups.iter().map(|g| group_sum(g, &m, &sc)).collect();
        let mut dyn_sum: f64 = (self.dynamic_start..n_pos).map(|p| m[p] * sc[p]).sum();
        let mut since = vec![0usize; self.groups.len()];
        let (mut best_total, mut best_ref) = (1.0f64, 0i32);
        let k = self.k;

        for (n, &x) in symbols.iter().enumerate() {
            let mut rescale = false;
            for (gi, g) in self.groups.iter().enumerate() {
                let phase = n % g.period;
                if !g.active[phase] {
                    continue;
                }
                let base = phase * g.len;
                let ms = &mut m[g.start..g.start + g.len];
                let scs = &sc[g.start..g.start + g.len];
                let mut sum = 0.0;
                for j in 0..g.len {
                    let mv = ms[j] * g.factors[(base + j) * k + x];
                    ms[j] = mv;
                    sum += mv * scs[j];
                }
                gsum[gi] = sum;
                since[gi] += 1;
                if since[gi] >= g.check_every {
                    since[gi] = 0;
                    let mut moved = false;
                    for pos in g.start..g.start + g.len {
                        let mut mv = m[pos];
                        if !(mv >= lo && mv <= hi) && e[pos] != DEAD {
                            rescale |= renormalize(&mut mv, &mut e[pos], reference, &mut sc[pos]);
                            m[pos] = mv;
                            moved = true;
                        }
                    }
                    if moved {
                        gsum[gi] = group_sum(g, &m, &sc);
                    }
                }
            }
            if !self.dynamic.is_empty() {
                let mut sum = 0.0;
                for (j, d) in self.dynamic.iter().enumerate() {
                    let pos = self.dynamic_start + j;
                    let mut mv = m[pos];
                    if e[pos] != DEAD {
                        let f = d.factor(&symbols[..n], x);
                        if !f.is_one() {
                            let (fm, fe) = split_factor(&f);
                            mv *= fm;
                            e[pos] += fe;
                            if fe != 0 {
                                rescale = true;
                            }
                            if !(mv >= lo && mv <= hi) {
                                rescale |= renormalize(&mut mv, &mut e[pos], reference, &mut sc[pos]);
                            }
                        }
                    }
                    m[pos] = mv;
                    sum += mv * sc[pos];
                }
                dyn_sum = sum;
            }
            if rescale {
                let live = e.iter().copied().filter(|&ex| ex != DEAD).max();
                reference = reference.max(live.unwrap_or(reference));
                for p in 0..n_pos {
                    sc[p] = scale(e[p], reference);
                }
                for (gi, g) in self.groups.iter().enumerate() {
                    gsum[gi] = group_sum(g, &m, &sc);
                }
                dyn_sum = (self.dynamic_start..n_pos).map(|p| m[p] * sc[p]).sum();
            }
            let total: f64 = gsum.iter().sum::<f64>() + dyn_sum;
            let better = if reference == best_ref { total > best_total } else { total * 2f64.powi(reference - best_ref) > best_total };
            if better {
                best_total = total;
                best_ref = reference;
            }
        }
        (best_total.log2() + best_ref as f64).max(0.0)
    }
}

fn scale(e: i32, reference: i32) -> f64 {
    if e == DEAD {
        0.0
    } else {
        2f64.powi((e - reference).max(-2000))
    }
}

fn value_log2(m: f64, e: i32) -> f64 {
    if e == DEAD || m == 0.0 {
        f64::NEG_INFINITY
    } else {
        m.log2() + e as f64
    }
}

fn log_sum_exp2(values: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = values.collect();
    let top = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return top;
    }
    top + v.iter().map(|x| (x - top).exp2()).sum::<f64>().log2()
}

/// Brings `m` back into range; returns true when the shared reference
/// exponent may need to move.
#[cold]
fn renormalize(m: &mut f64, e: &mut i32, reference: i32, sc: &mut f64) -> bool {
    if *m == 0.0 || *e == DEAD {
        *m = 0.0;
        *e = DEAD;
        *sc = 0.0;
        return false;
    }
    let (hi, lo) = (hi(), lo());
    while *m > hi {
        *m *= lo;
        *e += SPAN;
    }
    while *m < lo {
        *m *= hi;
        *e -= SPAN;
    }
    *sc = scale(*e, reference);
    *e > reference
}

#[inline]
fn track_max(m: f64, e: i32, bm: &mut f64, be: &mut i32, bn: &mut usize, n: usize) {
    let better = if e == *be {
        m > *bm
    } else if e == DEAD {
        false
    } else {
        m * 2f64.powi((e - *be).clamp(-2000, 2000)) > *bm
    };
    if better {
        *bm = m;
        *be = e;
        *bn = n;
    }
}

/// A positive factor as `m · 2^e` with `m` moderate.
fn split_factor(f: &Rational) -> (f64, i32) {
    let v = f.to_f64();
    if v.is_normal() && v < 2f64.powi(256) && v > 2f64.powi(-256) {
        return (v, 0);
    }
    if f.is_zero() {
        return (0.0, 0);
    }
    let l = f.log2();
    let ex = (l / SPAN as f64).floor() as i32 * SPAN;
    ((l - ex as f64).exp2(), ex)
}

/// Deficiency scan of `battery` along `prefix`.
pub fn scan_battery(prefix: &SequencePrefix, sys: &ForecastingSystem, battery: &[MultiplierProcess]) -> Result<ScanResult> {
    check_battery(battery, sys)?;
    prefix.space.ensure_same(sys.space())?;
    Ok(CompiledBattery::new(battery)?.scan(&prefix.symbols))
}
