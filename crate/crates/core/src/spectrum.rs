//! Link x slot occupancy, first-fit search and the per-connection
//! reduce / expand / re-allocate / block cascade.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use crate::topology::{CandidatePath, LinkId};
use crate::ConnId;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumGrid {
    num_links: usize,
    num_slots: usize,
    slot_width_ghz: f64,
    occupied: Vec<bool>,
}

impl SpectrumGrid {
    pub fn new(num_links: usize, num_slots: usize, slot_width_ghz: f64) -> Self {
        SpectrumGrid {
            num_links,
            num_slots,
            slot_width_ghz,
            occupied: vec![false; num_links * num_slots],
        }
    }

    pub fn num_links(&self) -> usize {
        self.num_links
    }

    pub fn num_slots(&self) -> usize {
        self.num_slots
    }

    pub fn slot_width_ghz(&self) -> f64 {
        self.slot_width_ghz
    }

    pub fn is_occupied(&self, link: LinkId, slot: usize) -> bool {
        self.occupied[link.0 * self.num_slots + slot]
    }

    fn set(&mut self, links: &[LinkId], start: usize, width: usize, value: bool) {
        for l in links {
            let base = l.0 * self.num_slots;
            self.occupied[base + start..base + start + width].fill(value);
        }
    }

    /// True when `[start, start + width)` is inside the grid and free on every link.
    pub fn is_free(&self, links: &[LinkId], start: usize, width: usize) -> bool {
        start + width <= self.num_slots
            && links.iter().all(|l| {
                let base = l.0 * self.num_slots;
                !self.occupied[base + start..base + start + width].iter().any(|&b| b)
            })
    }

    pub fn occupied_cells(&self) -> usize {
        self.occupied.iter().filter(|&&b| b).count()
    }

    /// Highest occupied slot over all links, 1-based; 0 for an empty grid.
    pub fn highest_slot(&self) -> usize {
        (0..self.num_slots)
            .rev()
            .find(|&f| (0..self.num_links).any(|l| self.occupied[l * self.num_slots + f]))
            .map_or(0, |f| f + 1)
    }
}

/// Lowest start slot such that `width` slots are free on every link of the path.
pub fn first_fit_place(grid: &SpectrumGrid, links: &[LinkId], width: usize) -> Option<usize> {
    if width == 0 || width > grid.num_slots {
        return None;
    }
    let mut run = 0;
    for f in 0..grid.num_slots {
        if links.iter().all(|&l| !grid.is_occupied(l, f)) {
            run += 1;
            if run == width {
                return Some(f + 1 - width);
            }
        } else {
            run = 0;
        }
    }
    None
}

/// Contiguous block of slots held by a connection on every link of its path.
#[derive(Debug, Clone, PartialEq)]
pub struct Allocation {
    pub conn: ConnId,
    pub path: CandidatePath,
    /// 0-based first slot.
    pub start: usize,
    pub width: usize,
}

impl Allocation {
    pub fn end(&self) -> usize {
        self.start + self.width
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkState {
    grid: SpectrumGrid,
    allocations: BTreeMap<ConnId, Allocation>,
}

impl NetworkState {
    pub fn new(num_links: usize, num_slots: usize, slot_width_ghz: f64) -> Self {
        NetworkState {
            grid: SpectrumGrid::new(num_links, num_slots, slot_width_ghz),
            allocations: BTreeMap::new(),
        }
    }

    pub fn grid(&self) -> &SpectrumGrid {
        &self.grid
    }

    pub fn allocations(&self) -> &BTreeMap<ConnId, Allocation> {
        &self.allocations
    }

    pub fn allocation(&self, conn: ConnId) -> Option<&Allocation> {
        self.allocations.get(&conn)
    }

    /// Claims the allocation's slots. Panics if any slot is already taken.
    pub fn allocate(&mut self, a: Allocation) {
        assert!(
            self.grid.is_free(&a.path.links, a.start, a.width),
            "slots [{}, {}) not free for connection {}",
            a.start,
            a.end(),
            a.conn
        );
        assert!(!self.allocations.contains_key(&a.conn), "connection {} already allocated", a.conn);
        self.grid.set(&a.path.links, a.start, a.width, true);
        self.allocations.insert(a.conn, a);
    }

    pub fn release(&mut self, conn: ConnId) -> Option<Allocation> {
        let a = self.allocations.remove(&conn)?;
        self.grid.set(&a.path.links, a.start, a.width, false);
        Some(a)
    }

    /// Records an allocation without checking or marking the grid. Only
    /// useful for building deliberately inconsistent states.
    pub fn insert_unchecked(&mut self, a: Allocation) {
        self.allocations.insert(a.conn, a);
    }

    /// Marks cells occupied without an owning allocation.
    pub fn mark_unchecked(&mut self, link: LinkId, slot: usize) {
        self.grid.set(&[link], slot, 1, true);
    }

    pub fn utilization(&self) -> usize {
        self.grid.occupied_cells()
    }

    pub fn f_max(&self) -> usize {
        self.grid.highest_slot()
    }

    /// Text grid (`#` busy, `.` free) followed by `conn,path_index,start,width`
    /// rows with 1-based start slots.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for l in 0..self.grid.num_links {
            let _ = write!(out, "L{l:<3} ");
            for f in 0..self.grid.num_slots {
                out.push(if self.grid.is_occupied(LinkId(l), f) { '#' } else { '.' });
            }
            out.push('\n');
        }
        out.push_str("conn,path_index,start,width\n");
        for a in self.allocations.values() {
            let _ = writeln!(out, "{},{},{},{}", a.conn, a.path.index, a.start + 1, a.width);
        }
        out
    }
}

/// A candidate path together with the slot count the demand needs on it.
#[derive(Debug, Clone, PartialEq)]
pub struct PathOption {
    pub path: CandidatePath,
    pub width: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ActionKind {
    /// First placement of a connection with no prior allocation.
    Established,
    Unchanged,
    Reduced,
    Expanded,
    Reallocated,
    Blocked,
}

impl fmt::Display for ActionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ActionKind::Established => "established",
            ActionKind::Unchanged => "unchanged",
            ActionKind::Reduced => "reduced",
            ActionKind::Expanded => "expanded",
            ActionKind::Reallocated => "reallocated",
            ActionKind::Blocked => "blocked",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ActionOutcome {
    pub conn: ConnId,
    pub kind: ActionKind,
    pub old: Option<Allocation>,
    pub new: Option<Allocation>,
}

impl ActionOutcome {
    pub fn is_disruption(&self) -> bool {
        is_disruption(self.old.as_ref(), self.new.as_ref())
    }
}

/// A live connection moved to another path or start slot.
pub fn is_disruption(old: Option<&Allocation>, new: Option<&Allocation>) -> bool {
    match (old, new) {
        (Some(o), Some(n)) => o.path.links != n.path.links || o.start != n.start,
        _ => false,
    }
}

fn first_fit_over(state: &NetworkState, conn: ConnId, options: &[PathOption]) -> Option<Allocation> {
    options.iter().find_map(|opt| {
        first_fit_place(&state.grid, &opt.path.links, opt.width).map(|start| Allocation {
            conn,
            path: opt.path.clone(),
            start,
            width: opt.width,
        })
    })
}

/// Applies the provisioning cascade for one connection. `options` lists the
/// candidate paths in preference order with the width required on each.
///
/// An existing allocation is first kept, shrunk (keeping its start) or grown
/// upward in place on its current path; failing that the connection is
/// released and first-fit placed over all options, and blocked if nothing fits.
pub fn plan_action(state: &mut NetworkState, conn: ConnId, options: &[PathOption]) -> ActionOutcome {
    let Some(old) = state.allocations.get(&conn).cloned() else {
        return match first_fit_over(state, conn, options) {
            Some(new) => {
                state.allocate(new.clone());
                ActionOutcome { conn, kind: ActionKind::Established, old: None, new: Some(new) }
            }
            None => ActionOutcome { conn, kind: ActionKind::Blocked, old: None, new: None },
        };
    };

    if let Some(same) = options.iter().find(|o| o.path.links == old.path.links) {
        let width = same.width;
        let in_place = |kind| {
            let new = Allocation { width, ..old.clone() };
            (kind, new)
        };
        let step = if width == old.width {
            Some(in_place(ActionKind::Unchanged))
        } else if width < old.width && width >= 1 {
            Some(in_place(ActionKind::Reduced))
        } else if width > old.width
            && state.grid.is_free(&old.path.links, old.end(), width - old.width)
        {
            Some(in_place(ActionKind::Expanded))
        } else {
            None
        };
        if let Some((kind, new)) = step {
            state.release(conn);
            state.allocate(new.clone());
            return ActionOutcome { conn, kind, old: Some(old), new: Some(new) };
        }
    }

    state.release(conn);
    match first_fit_over(state, conn, options) {
        Some(new) => {
            state.allocate(new.clone());
            let kind = if is_disruption(Some(&old), Some(&new)) {
                ActionKind::Reallocated
            } else {
                ActionKind::Unchanged
            };
            ActionOutcome { conn, kind, old: Some(old), new: Some(new) }
        }
        None => ActionOutcome { conn, kind: ActionKind::Blocked, old: Some(old), new: None },
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// A (link, slot) cell claimed by more than one connection.
    Overlap { link: LinkId, slot: usize, conns: Vec<ConnId> },
    OutOfBounds { conn: ConnId, start: usize, width: usize },
    EmptyAllocation { conn: ConnId },
    UnknownLink { conn: ConnId, link: LinkId },
    /// Grid cell disagrees with the allocation table.
    GridMismatch { link: LinkId, slot: usize, occupied: bool },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Overlap { link, slot, conns } => {
                write!(f, "non-overlap: link {link} slot {} claimed by {conns:?}", slot + 1)
            }
            Violation::OutOfBounds { conn, start, width } => {
                write!(f, "bounds: connection {conn} start {} width {width}", start + 1)
            }
            Violation::EmptyAllocation { conn } => write!(f, "connection {conn} holds zero slots"),
            Violation::UnknownLink { conn, link } => {
                write!(f, "connection {conn} routed over unknown link {link}")
            }
            Violation::GridMismatch { link, slot, occupied } => write!(
                f,
                "continuity: link {link} slot {} marked {} but allocations disagree",
                slot + 1,
                if *occupied { "busy" } else { "free" }
            ),
        }
    }
}

/// Re-derives occupancy from the allocation table and reports every
/// inconsistency.
pub fn validate(state: &NetworkState) -> Result<(), Vec<Violation>> {
    let grid = &state.grid;
    let mut claims: Vec<Vec<ConnId>> = vec![Vec::new(); grid.num_links * grid.num_slots];
    let mut violations = Vec::new();
    for a in state.allocations.values() {
        if a.width == 0 {
            violations.push(Violation::EmptyAllocation { conn: a.conn });
            continue;
        }
        if a.end() > grid.num_slots {
            violations.push(Violation::OutOfBounds { conn: a.conn, start: a.start, width: a.width });
            continue;
        }
        for &l in &a.path.links {
            if l.0 >= grid.num_links {
                violations.push(Violation::UnknownLink { conn: a.conn, link: l });
                continue;
            }
            for f in a.start..a.end() {
                claims[l.0 * grid.num_slots + f].push(a.conn);
            }
        }
    }
    for l in 0..grid.num_links {
        for f in 0..grid.num_slots {
            let owners = &claims[l * grid.num_slots + f];
            if owners.len() > 1 {
                violations.push(Violation::Overlap { link: LinkId(l), slot: f, conns: owners.clone() });
            }
            let busy = grid.is_occupied(LinkId(l), f);
            if busy != !owners.is_empty() {
                violations.push(Violation::GridMismatch { link: LinkId(l), slot: f, occupied: busy });
            }
        }
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}
