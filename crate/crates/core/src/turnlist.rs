//! Double-ended list of turns with the range of their values.
//!
//! Two stacks meet in the middle; every entry carries the min and max of
//! the values beneath it on its stack. Pushes and pops at either end are
//! amortized O(1) (a pop from an empty side moves half of the other side
//! over), and the value range is read off the two tops.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct RawTurn {
    pub x: i128,
    pub y: i128,
}

#[derive(Clone, Copy, Debug)]
struct Entry {
    turn: RawTurn,
    lo: i128,
    hi: i128,
}

fn stacked(below: Option<&Entry>, turn: RawTurn) -> Entry {
    match below {
        Some(e) => Entry { turn, lo: e.lo.min(turn.y), hi: e.hi.max(turn.y) },
        None => Entry { turn, lo: turn.y, hi: turn.y },
    }
}

#[derive(Clone, Debug, Default)]
pub(crate) struct TurnList {
    // front stack is stored reversed: its top is the first turn
    front: Vec<Entry>,
    back: Vec<Entry>,
}

impl TurnList {
    pub fn new() -> Self {
        TurnList::default()
    }

    pub fn len(&self) -> usize {
        self.front.len() + self.back.len()
    }

    pub fn get(&self, i: usize) -> RawTurn {
        let f = self.front.len();
        if i < f {
            self.front[f - 1 - i].turn
        } else {
            self.back[i - f].turn
        }
    }

    pub fn front(&self) -> Option<RawTurn> {
        match self.front.last() {
            Some(e) => Some(e.turn),
            None => self.back.first().map(|e| e.turn),
        }
    }

    pub fn back(&self) -> Option<RawTurn> {
        match self.back.last() {
            Some(e) => Some(e.turn),
            None => self.front.first().map(|e| e.turn),
        }
    }

    pub fn push_front(&mut self, turn: RawTurn) {
        let e = stacked(self.front.last(), turn);
        self.front.push(e);
    }

    pub fn push_back(&mut self, turn: RawTurn) {
        let e = stacked(self.back.last(), turn);
        self.back.push(e);
    }

    pub fn pop_front(&mut self) -> Option<RawTurn> {
        if self.front.is_empty() {
            self.rebalance();
        }
        match self.front.pop() {
            Some(e) => Some(e.turn),
            None => self.back.pop().map(|e| e.turn),
        }
    }

    pub fn pop_back(&mut self) -> Option<RawTurn> {
        if self.back.is_empty() {
            self.rebalance();
        }
        match self.back.pop() {
            Some(e) => Some(e.turn),
            None => self.front.pop().map(|e| e.turn),
        }
    }

    /// Splits the turns evenly between the two stacks.
    fn rebalance(&mut self) {
        let all: Vec<RawTurn> = self.iter().collect();
        let mid = all.len() / 2;
        self.front.clear();
        self.back.clear();
        for t in all[..mid].iter().rev() {
            self.push_front(*t);
        }
        for t in &all[mid..] {
            self.push_back(*t);
        }
    }

    pub fn clear(&mut self) {
        self.front.clear();
        self.back.clear();
    }

    /// First index whose turn fails `pred`, for `pred` monotone in position.
    pub fn partition_point(&self, mut pred: impl FnMut(&RawTurn) -> bool) -> usize {
        let (mut lo, mut hi) = (0, self.len());
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if pred(&self.get(mid)) {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        lo
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = RawTurn> + '_ {
        self.front.iter().rev().chain(self.back.iter()).map(|e| e.turn)
    }

    /// Turns with index in `start..`, in order.
    pub fn iter_from(&self, start: usize) -> impl Iterator<Item = RawTurn> + '_ {
        (start..self.len()).map(move |i| self.get(i))
    }

    /// Min and max turn value, if any turn exists.
    pub fn y_range(&self) -> Option<(i128, i128)> {
        let ends = [self.front.last(), self.back.last()];
        ends.into_iter().flatten().fold(None, |acc, e| match acc {
            None => Some((e.lo, e.hi)),
            Some((lo, hi)) => Some((lo.min(e.lo), hi.max(e.hi))),
        })
    }

    /// Applies `f` to every turn in order, rebuilding the range data.
    pub fn try_map(&mut self, mut f: impl FnMut(RawTurn) -> Option<RawTurn>) -> Option<()> {
        let all: Vec<RawTurn> = self.iter().collect();
        self.clear();
        for t in all {
            self.push_back(f(t)?);
        }
        Some(())
    }
}
