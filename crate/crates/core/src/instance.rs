//! Broadcast programs: items, the channel × slot occurrence grid, segments,
//! text/JSON I/O and instance generators.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_traits::{One, Signed, ToPrimitive};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InstanceError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("cell (channel {channel}, slot {slot}) holds more than one item")]
    DuplicateCell { channel: usize, slot: usize },
    #[error("occurrence references unknown item {item}")]
    UnknownItem { item: usize },
    #[error("item {item} has a negative weight")]
    NegativeWeight { item: usize },
    #[error("item ids must be dense 1..n; item {item} is missing or repeated")]
    ItemIds { item: usize },
    #[error("cell (channel {channel}, slot {slot}) lies outside the {channels} x {slots} grid")]
    OutOfGrid {
        channel: usize,
        slot: usize,
        channels: usize,
        slots: usize,
    },
    #[error("at least one channel and one antenna are required")]
    Empty,
    #[error("{antennae} antennae exceed the {channels} channels")]
    TooManyAntennae { antennae: usize, channels: usize },
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error("json: {0}")]
    Json(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Item {
    pub id: usize,
    pub weight: Rational,
}

/// One broadcast of `item` on `channel` in `slot` (both 1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Occurrence {
    pub item: usize,
    pub channel: usize,
    pub slot: usize,
}

impl Occurrence {
    pub fn new(item: usize, channel: usize, slot: usize) -> Self {
        Self { item, channel, slot }
    }

    /// Canonical order: slot, then channel.
    pub fn cell(&self) -> (usize, usize) {
        (self.slot, self.channel)
    }
}

/// True iff a single antenna can retrieve `a` and then `b`.
///
/// Staying on a channel only needs a later slot; switching channels costs
/// one idle slot.
pub fn conflict_free(a: &Occurrence, b: &Occurrence) -> bool {
    if b.slot <= a.slot {
        return false;
    }
    a.channel == b.channel || b.slot - a.slot >= 2
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    items: Vec<Item>,
    channels: usize,
    slots: usize,
    antennae: usize,
    /// Sorted by (slot, channel); at most one per cell.
    occurrences: Vec<Occurrence>,
}

impl Instance {
    pub fn new(
        weights: Vec<Rational>,
        channels: usize,
        slots: usize,
        antennae: usize,
        occurrences: impl IntoIterator<Item = Occurrence>,
    ) -> Result<Self, InstanceError> {
        if channels == 0 || antennae == 0 {
            return Err(InstanceError::Empty);
        }
        if antennae > channels {
            return Err(InstanceError::TooManyAntennae { antennae, channels });
        }
        let items: Vec<Item> = weights
            .into_iter()
            .enumerate()
            .map(|(i, weight)| Item { id: i + 1, weight })
            .collect();
        if let Some(it) = items.iter().find(|it| it.weight.is_negative()) {
            return Err(InstanceError::NegativeWeight { item: it.id });
        }
        let mut occ: Vec<Occurrence> = occurrences.into_iter().collect();
        for o in &occ {
            if o.item == 0 || o.item > items.len() {
                return Err(InstanceError::UnknownItem { item: o.item });
            }
            if o.channel == 0 || o.channel > channels || o.slot == 0 || o.slot > slots {
                return Err(InstanceError::OutOfGrid {
                    channel: o.channel,
                    slot: o.slot,
                    channels,
                    slots,
                });
            }
        }
        occ.sort_by_key(Occurrence::cell);
        if let Some(w) = occ.windows(2).find(|w| w[0].cell() == w[1].cell()) {
            return Err(InstanceError::DuplicateCell {
                channel: w[0].channel,
                slot: w[0].slot,
            });
        }
        Ok(Self {
            items,
            channels,
            slots,
            antennae,
            occurrences: occ,
        })
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn num_items(&self) -> usize {
        self.items.len()
    }

    pub fn weight(&self, item: usize) -> Rational {
        self.items[item - 1].weight
    }

    pub fn total_weight(&self) -> Rational {
        self.items.iter().map(|i| i.weight).sum()
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn slots(&self) -> usize {
        self.slots
    }

    pub fn antennae(&self) -> usize {
        self.antennae
    }

    /// All occurrences in (slot, channel) order.
    pub fn occurrences(&self) -> &[Occurrence] {
        &self.occurrences
    }

    pub fn item_at(&self, channel: usize, slot: usize) -> Option<usize> {
        self.occurrences
            .binary_search_by_key(&(slot, channel), Occurrence::cell)
            .ok()
            .map(|i| self.occurrences[i].item)
    }

    pub fn is_vacant(&self, slot: usize) -> bool {
        let start = self.occurrences.partition_point(|o| o.slot < slot);
        self.occurrences.get(start).is_none_or(|o| o.slot != slot)
    }

    pub fn with_antennae(&self, antennae: usize) -> Result<Self, InstanceError> {
        let weights = self.items.iter().map(|i| i.weight).collect();
        Self::new(
            weights,
            self.channels,
            self.slots,
            antennae,
            self.occurrences.iter().copied(),
        )
    }

    /// Number of slots that hold at least one item broadcast again later.
    pub fn recurring_slots(&self) -> usize {
        let mut last: BTreeMap<usize, usize> = BTreeMap::new();
        for o in &self.occurrences {
            let e = last.entry(o.item).or_insert(o.slot);
            *e = (*e).max(o.slot);
        }
        let mut slots: Vec<usize> = self
            .occurrences
            .iter()
            .filter(|o| last[&o.item] > o.slot)
            .map(|o| o.slot)
            .collect();
        slots.dedup();
        slots.len()
    }
}

/// Maximal runs of non-vacant slots, as inclusive `(first, last)` ranges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentMap {
    segments: Vec<(usize, usize)>,
    gamma: usize,
}

impl SegmentMap {
    /// Treats slots `1..=slots` as a single segment regardless of vacancies.
    pub fn whole_horizon(slots: usize) -> Self {
        if slots == 0 {
            return Self {
                segments: Vec::new(),
                gamma: 0,
            };
        }
        Self {
            segments: vec![(1, slots)],
            gamma: slots,
        }
    }

    pub fn segments(&self) -> &[(usize, usize)] {
        &self.segments
    }

    pub fn gamma(&self) -> usize {
        self.gamma
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn segment_of(&self, slot: usize) -> Option<usize> {
        let i = self.segments.partition_point(|&(_, last)| last < slot);
        match self.segments.get(i) {
            Some(&(first, _)) if first <= slot => Some(i),
            _ => None,
        }
    }
}

pub fn segment_map(inst: &Instance) -> SegmentMap {
    let mut segments = Vec::new();
    let mut start: Option<usize> = None;
    for slot in 1..=inst.slots() {
        match (inst.is_vacant(slot), start) {
            (false, None) => start = Some(slot),
            (true, Some(s)) => {
                segments.push((s, slot - 1));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        segments.push((s, inst.slots()));
    }
    let gamma = segments.iter().map(|&(a, b)| b - a + 1).max().unwrap_or(0);
    SegmentMap { segments, gamma }
}

/// Each item appears at most once within every segment.
pub fn occurrence_assumption_holds(inst: &Instance) -> bool {
    let seg = segment_map(inst);
    let mut seen = std::collections::HashSet::new();
    inst.occurrences()
        .iter()
        .all(|o| seen.insert((seg.segment_of(o.slot), o.item)))
}

fn parse_rational(s: &str) -> Option<Rational> {
    match s.split_once('/') {
        Some((n, d)) => {
            let n: i128 = n.trim().parse().ok()?;
            let d: i128 = d.trim().parse().ok()?;
            (d != 0).then(|| Rational::new(n, d))
        }
        None => s.trim().parse::<i128>().ok().map(Rational::from_integer),
    }
}

pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_instance(text: &str) -> Result<Instance, InstanceError> {
    let err = |line: usize, msg: &str| InstanceError::Parse {
        line,
        msg: msg.to_string(),
    };
    let mut header: Option<(usize, usize, usize, usize, usize)> = None;
    let mut weights: BTreeMap<usize, (usize, Rational)> = BTreeMap::new();
    let mut occ: Vec<(usize, Occurrence)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        let nums = |fs: &[&str]| -> Result<Vec<usize>, InstanceError> {
            fs.iter()
                .map(|f| f.parse::<usize>().map_err(|_| err(line, &format!("expected an integer, got `{f}`"))))
                .collect()
        };
        match fields[0] {
            "alwdr" => {
                if header.is_some() {
                    return Err(err(line, "duplicate header"));
                }
                if fields.len() != 5 {
                    return Err(err(line, "header must be `alwdr n m T delta`"));
                }
                let v = nums(&fields[1..])?;
                header = Some((v[0], v[1], v[2], v[3], line));
            }
            "item" => {
                if header.is_none() {
                    return Err(err(line, "item before header"));
                }
                if fields.len() != 3 {
                    return Err(err(line, "item line must be `item <id> <num>/<den>`"));
                }
                let id = nums(&fields[1..2])?[0];
                let w = parse_rational(fields[2])
                    .ok_or_else(|| err(line, &format!("bad weight `{}`", fields[2])))?;
                if w.is_negative() {
                    return Err(err(line, &format!("item {id} has a negative weight")));
                }
                if weights.insert(id, (line, w)).is_some() {
                    return Err(err(line, &format!("item {id} declared twice")));
                }
            }
            "occ" => {
                if header.is_none() {
                    return Err(err(line, "occurrence before header"));
                }
                if fields.len() != 4 {
                    return Err(err(line, "occurrence line must be `occ <item> <channel> <slot>`"));
                }
                let v = nums(&fields[1..])?;
                occ.push((line, Occurrence::new(v[0], v[1], v[2])));
            }
            other => return Err(err(line, &format!("unknown record `{other}`"))),
        }
    }

    let (n, m, t, delta, hline) = header.ok_or_else(|| err(1, "missing `alwdr` header"))?;
    if weights.len() != n || weights.keys().copied().ne(1..=n) {
        return Err(err(hline, &format!("header declares {n} items; item ids must be exactly 1..{n}")));
    }
    if m == 0 || delta == 0 {
        return Err(err(hline, "at least one channel and one antenna are required"));
    }
    if delta > m {
        return Err(err(hline, &format!("{delta} antennae exceed the {m} channels")));
    }
    let mut cells: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for &(line, o) in &occ {
        if o.item == 0 || o.item > n {
            return Err(err(line, &format!("unknown item {}", o.item)));
        }
        if o.channel == 0 || o.channel > m || o.slot == 0 || o.slot > t {
            return Err(err(line, &format!("cell ({}, {}) outside the grid", o.channel, o.slot)));
        }
        if let Some(first) = cells.insert((o.channel, o.slot), line) {
            return Err(err(
                line,
                &format!("duplicate cell (channel {}, slot {}), first used on line {first}", o.channel, o.slot),
            ));
        }
    }
    Instance::new(
        weights.into_values().map(|(_, w)| w).collect(),
        m,
        t,
        delta,
        occ.into_iter().map(|(_, o)| o),
    )
}

pub fn serialize_instance(inst: &Instance) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "alwdr {} {} {} {}",
        inst.num_items(),
        inst.channels(),
        inst.slots(),
        inst.antennae()
    );
    for it in inst.items() {
        let _ = writeln!(out, "item {} {}", it.id, format_rational(&it.weight));
    }
    for o in inst.occurrences() {
        let _ = writeln!(out, "occ {} {} {}", o.item, o.channel, o.slot);
    }
    out
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct JsonItem {
    id: usize,
    weight: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[allow(non_snake_case)]
struct JsonInstance {
    n: usize,
    m: usize,
    T: usize,
    delta: usize,
    items: Vec<JsonItem>,
    occ: Vec<Occurrence>,
}

pub fn instance_to_json(inst: &Instance) -> String {
    let doc = JsonInstance {
        n: inst.num_items(),
        m: inst.channels(),
        T: inst.slots(),
        delta: inst.antennae(),
        items: inst
            .items()
            .iter()
            .map(|i| JsonItem {
                id: i.id,
                weight: format_rational(&i.weight),
            })
            .collect(),
        occ: inst.occurrences().to_vec(),
    };
    serde_json::to_string_pretty(&doc).expect("instance serializes")
}

pub fn instance_from_json(text: &str) -> Result<Instance, InstanceError> {
    let doc: JsonInstance =
        serde_json::from_str(text).map_err(|e| InstanceError::Json(e.to_string()))?;
    let mut items = doc.items;
    items.sort_by_key(|i| i.id);
    if items.len() != doc.n {
        return Err(InstanceError::ItemIds { item: items.len() + 1 });
    }
    let mut weights = Vec::with_capacity(items.len());
    for (k, it) in items.iter().enumerate() {
        if it.id != k + 1 {
            return Err(InstanceError::ItemIds { item: k + 1 });
        }
        weights.push(
            parse_rational(&it.weight)
                .ok_or_else(|| InstanceError::Json(format!("bad weight `{}`", it.weight)))?,
        );
    }
    Instance::new(weights, doc.m, doc.T, doc.delta, doc.occ)
}

/// Accepts either the line format or its JSON mirror.
pub fn read_instance(text: &str) -> Result<Instance, InstanceError> {
    if text.trim_start().starts_with('{') {
        instance_from_json(text)
    } else {
        parse_instance(text)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenParams {
    pub items: usize,
    pub channels: usize,
    pub slots: usize,
    pub antennae: usize,
    /// Inclusive integer weight range.
    pub weight_range: (u32, u32),
    /// Fraction of usable cells that receive an item, in (0, 1].
    pub density: f64,
    pub max_occurrences: usize,
    pub single_occurrence: bool,
    /// Insert a vacant slot after every `gamma` slots.
    pub gamma: Option<usize>,
    /// Never repeat an item inside a segment.
    pub once_per_segment: bool,
}

impl Default for GenParams {
    fn default() -> Self {
        Self {
            items: 5,
            channels: 2,
            slots: 6,
            antennae: 1,
            weight_range: (1, 10),
            density: 0.6,
            max_occurrences: 2,
            single_occurrence: false,
            gamma: None,
            once_per_segment: false,
        }
    }
}

pub fn generate_random(params: &GenParams, seed: u64) -> Result<Instance, InstanceError> {
    let p = params;
    if p.items == 0 || p.channels == 0 || p.slots == 0 || p.antennae == 0 {
        return Err(InstanceError::Params("counts must be positive".into()));
    }
    if !(p.density > 0.0 && p.density <= 1.0) {
        return Err(InstanceError::Params(format!("density {} not in (0, 1]", p.density)));
    }
    if p.weight_range.0 > p.weight_range.1 {
        return Err(InstanceError::Params("empty weight range".into()));
    }
    if p.gamma == Some(0) {
        return Err(InstanceError::Params("gamma must be positive".into()));
    }
    let max_occ = if p.single_occurrence { 1 } else { p.max_occurrences.max(1) };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights: Vec<Rational> = (0..p.items)
        .map(|_| Rational::from_integer(rng.gen_range(p.weight_range.0..=p.weight_range.1) as i128))
        .collect();

    let usable = |slot: usize| p.gamma.is_none_or(|g| !slot.is_multiple_of(g + 1));
    let segment_id = |slot: usize| p.gamma.map_or(0, |g| slot / (g + 1));
    let mut cells: Vec<(usize, usize)> = (1..=p.slots)
        .filter(|&s| usable(s))
        .flat_map(|s| (1..=p.channels).map(move |c| (s, c)))
        .collect();
    let fill = ((cells.len() as f64) * p.density).round() as usize;
    if fill > p.items * max_occ {
        return Err(InstanceError::Params(format!(
            "{fill} cells to fill but only {} item occurrences allowed",
            p.items * max_occ
        )));
    }
    cells.shuffle(&mut rng);
    cells.truncate(fill);
    cells.sort();

    let mut count = vec![0usize; p.items + 1];
    let mut in_segment: BTreeMap<(usize, usize), bool> = BTreeMap::new();
    let mut occ = Vec::with_capacity(fill);
    for (slot, channel) in cells {
        let seg = segment_id(slot);
        let allowed = |item: usize, count: &[usize]| {
            count[item] < max_occ && !(p.once_per_segment && in_segment.contains_key(&(seg, item)))
        };
        if !(1..=p.items).any(|i| allowed(i, &count)) {
            return Err(InstanceError::Params(format!(
                "no item can fill cell (channel {channel}, slot {slot})"
            )));
        }
        // Rejection-resample until an admissible item is drawn.
        let item = loop {
            let i = rng.gen_range(1..=p.items);
            if allowed(i, &count) {
                break i;
            }
        };
        count[item] += 1;
        in_segment.insert((seg, item), true);
        occ.push(Occurrence::new(item, channel, slot));
    }
    Instance::new(weights, p.channels, p.slots, p.antennae, occ)
}

/// Builds the retrieval instance of a 3-dimensional matching problem with
/// `x_size` elements per coordinate; triples are 1-based `(x, y, z)`.
pub fn generate_from_3dm(
    triples: &[(usize, usize, usize)],
    x_size: usize,
) -> Result<Instance, InstanceError> {
    if x_size == 0 {
        return Err(InstanceError::Params("empty ground set".into()));
    }
    for &(x, y, z) in triples {
        if [x, y, z].iter().any(|&c| c == 0 || c > x_size) {
            return Err(InstanceError::Params(format!(
                "triple ({x}, {y}, {z}) has a coordinate outside 1..{x_size}"
            )));
        }
    }
    let mut used = vec![0usize; x_size + 1];
    let mut occ = Vec::with_capacity(2 * triples.len());
    for &(x, y, z) in triples {
        used[x] += 1;
        let channel = used[x];
        let base = 3 * (x - 1);
        occ.push(Occurrence::new(y, channel, base + 1));
        occ.push(Occurrence::new(x_size + z, channel, base + 2));
    }
    let channels = used.iter().copied().max().unwrap_or(0).max(1);
    Instance::new(
        vec![Rational::one(); 2 * x_size],
        channels,
        3 * x_size,
        1,
        occ,
    )
}

/// `ceil(1/eps)` for `eps` in (0, 1].
pub fn phase_count(eps: &Rational) -> Result<usize, InstanceError> {
    if !eps.is_positive() || *eps > Rational::one() {
        return Err(InstanceError::Params(format!("epsilon {eps} not in (0, 1]")));
    }
    let inv = eps.recip();
    inv.ceil()
        .to_integer()
        .to_usize()
        .ok_or_else(|| InstanceError::Params("epsilon too small".into()))
}

/// Clears every slot `phase + j*ceil(1/eps)` for `j >= 1`.
pub fn insert_vacant_slots(
    inst: &Instance,
    eps: &Rational,
    phase: usize,
) -> Result<Instance, InstanceError> {
    let k = phase_count(eps)?;
    if phase == 0 || phase > k {
        return Err(InstanceError::Params(format!("phase {phase} not in 1..={k}")));
    }
    let cleared = |slot: usize| slot > phase && (slot - phase).is_multiple_of(k);
    let weights = inst.items().iter().map(|i| i.weight).collect();
    Instance::new(
        weights,
        inst.channels(),
        inst.slots(),
        inst.antennae(),
        inst.occurrences().iter().copied().filter(|o| !cleared(o.slot)),
    )
}

/// Slots cleared by [`insert_vacant_slots`].
pub fn vacated_slots(slots: usize, eps: &Rational, phase: usize) -> Result<Vec<usize>, InstanceError> {
    let k = phase_count(eps)?;
    Ok((1..).map(|j| phase + j * k).take_while(|&s| s <= slots).collect())
}
