//! Generalized Majority (Misra-Gries) frequent-item summary.
//!
//! `c` counters monitor items. A monitored item increments its counter. An
//! unmonitored item takes over a zero counter if one exists, otherwise every
//! counter is decremented. Every item occurring at least `n/(c+1)` times in a
//! stream of length `n` is monitored at the end.
//!
//! Counters live in groups of equal value, kept in a doubly linked list in
//! increasing order. Each group stores its value as a difference from the
//! previous group, so "decrement all" only touches the head group and each
//! offer runs in amortized O(1). Counters that reach zero are released, which
//! is equivalent to keeping a stale label on a zero counter.

use std::collections::HashMap;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

const NIL: usize = usize::MAX;

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Group {
    /// Value of this group minus the value of the previous group (or 0).
    delta: u64,
    prev: usize,
    next: usize,
    members: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Slot<T> {
    item: T,
    group: usize,
    pos: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeneralizedMajority<T: Hash + Eq> {
    capacity: usize,
    index: HashMap<T, usize>,
    slots: Vec<Option<Slot<T>>>,
    free_slots: Vec<usize>,
    groups: Vec<Group>,
    free_groups: Vec<usize>,
    head: usize,
    stream_len: u64,
}

impl<T: Hash + Eq + Clone + Ord> GeneralizedMajority<T> {
    /// A summary with `capacity` counters (at least one).
    pub fn new(capacity: usize) -> Self {
        assert!(capacity >= 1, "GM needs at least one counter");
        Self {
            capacity,
            index: HashMap::new(),
            slots: Vec::new(),
            free_slots: Vec::new(),
            groups: Vec::new(),
            free_groups: Vec::new(),
            head: NIL,
            stream_len: 0,
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Number of items currently holding a non-zero counter.
    pub fn monitored_len(&self) -> usize {
        self.index.len()
    }

    pub fn stream_len(&self) -> u64 {
        self.stream_len
    }

    pub fn is_monitored(&self, item: &T) -> bool {
        self.index.contains_key(item)
    }

    /// One step of the algorithm.
    pub fn offer(&mut self, item: &T) {
        self.stream_len += 1;
        if let Some(&slot) = self.index.get(item) {
            self.increment(slot);
        } else if self.index.len() < self.capacity {
            self.adopt(item.clone());
        } else {
            self.decrement_all();
        }
    }

    /// Offers `item` `weight` times in a row.
    pub fn offer_n(&mut self, item: &T, weight: u64) {
        for _ in 0..weight {
            self.offer(item);
        }
    }

    /// Current counter of `item`, zero when unmonitored. Walks the group
    /// list, so it costs O(number of distinct counter values).
    pub fn count(&self, item: &T) -> u64 {
        let Some(&slot) = self.index.get(item) else {
            return 0;
        };
        let target = self.slots[slot].as_ref().expect("live slot").group;
        let mut value = 0;
        let mut g = self.head;
        while g != NIL {
            value += self.groups[g].delta;
            if g == target {
                return value;
            }
            g = self.groups[g].next;
        }
        unreachable!("slot points at a group outside the list")
    }

    /// All monitored items with their counters, in no particular order.
    pub fn counters(&self) -> Vec<(T, u64)> {
        let mut out = Vec::with_capacity(self.index.len());
        let mut value = 0;
        let mut g = self.head;
        while g != NIL {
            let group = &self.groups[g];
            value += group.delta;
            for &s in &group.members {
                out.push((self.slots[s].as_ref().expect("live slot").item.clone(), value));
            }
            g = group.next;
        }
        out
    }

    /// The `m` monitored items with the largest counters, largest first;
    /// equal counters are ordered by item. Returns every monitored item when
    /// fewer than `m` are monitored.
    pub fn top(&self, m: usize) -> Vec<(T, u64)> {
        let mut all = self.counters();
        all.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        all.truncate(m);
        all
    }

    /// Replays another summary into this one, each monitored item weighted
    /// by its counter, heaviest first. The result is an approximation: the
    /// other stream's decrements are not replayed.
    pub fn merge_replay(&mut self, other: &Self) {
        for (item, count) in other.top(usize::MAX) {
            self.offer_n(&item, count);
        }
    }

    fn new_group(&mut self, delta: u64) -> usize {
        let group = Group {
            delta,
            prev: NIL,
            next: NIL,
            members: Vec::new(),
        };
        if let Some(g) = self.free_groups.pop() {
            self.groups[g] = group;
            g
        } else {
            self.groups.push(group);
            self.groups.len() - 1
        }
    }

    fn link_after(&mut self, prev: usize, g: usize) {
        let next = if prev == NIL {
            self.head
        } else {
            self.groups[prev].next
        };
        self.groups[g].prev = prev;
        self.groups[g].next = next;
        if prev == NIL {
            self.head = g;
        } else {
            self.groups[prev].next = g;
        }
        if next != NIL {
            self.groups[next].prev = g;
        }
    }

    /// Unlinks an empty group, folding its delta into its successor.
    fn unlink(&mut self, g: usize) {
        let Group {
            delta, prev, next, ..
        } = self.groups[g];
        if next != NIL {
            self.groups[next].delta += delta;
            self.groups[next].prev = prev;
        }
        if prev == NIL {
            self.head = next;
        } else {
            self.groups[prev].next = next;
        }
        self.groups[g].members.clear();
        self.free_groups.push(g);
    }

    fn attach(&mut self, slot: usize, g: usize) {
        let members = &mut self.groups[g].members;
        members.push(slot);
        let pos = members.len() - 1;
        let s = self.slots[slot].as_mut().expect("live slot");
        s.group = g;
        s.pos = pos;
    }

    fn detach(&mut self, slot: usize) -> usize {
        let s = self.slots[slot].as_ref().expect("live slot");
        let (g, pos) = (s.group, s.pos);
        let members = &mut self.groups[g].members;
        members.swap_remove(pos);
        if let Some(&moved) = members.get(pos) {
            self.slots[moved].as_mut().expect("live slot").pos = pos;
        }
        g
    }

    /// Group holding value `current + 1`, created after `g` when missing.
    fn successor_group(&mut self, g: usize) -> usize {
        let next = if g == NIL { self.head } else { self.groups[g].next };
        if next != NIL && self.groups[next].delta == 1 {
            return next;
        }
        let fresh = self.new_group(1);
        if next != NIL {
            self.groups[next].delta -= 1;
        }
        self.link_after(g, fresh);
        fresh
    }

    fn increment(&mut self, slot: usize) {
        let g = self.slots[slot].as_ref().expect("live slot").group;
        let target = self.successor_group(g);
        self.detach(slot);
        self.attach(slot, target);
        if self.groups[g].members.is_empty() {
            self.unlink(g);
        }
    }

    fn adopt(&mut self, item: T) {
        let target = self.successor_group(NIL);
        let slot = Slot {
            item: item.clone(),
            group: target,
            pos: 0,
        };
        let slot_id = if let Some(s) = self.free_slots.pop() {
            self.slots[s] = Some(slot);
            s
        } else {
            self.slots.push(Some(slot));
            self.slots.len() - 1
        };
        self.attach(slot_id, target);
        self.index.insert(item, slot_id);
    }

    fn decrement_all(&mut self) {
        let head = self.head;
        if head == NIL {
            return;
        }
        self.groups[head].delta -= 1;
        if self.groups[head].delta > 0 {
            return;
        }
        let released = std::mem::take(&mut self.groups[head].members);
        for slot in released {
            let s = self.slots[slot].take().expect("live slot");
            self.index.remove(&s.item);
            self.free_slots.push(slot);
        }
        self.unlink(head);
    }
}
