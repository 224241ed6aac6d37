//! Atom automata. Every first-order track they mention holds exactly one 1.

use crate::automata::{AutomataError, Cube, Track, TrackKind, TrackNfa, TrackRegistry};

/// Small automaton from named-bit edges: `(from, [(track, bit)], to)`.
fn build(tracks: Vec<Track>, states: usize, finals: &[usize], edges: &[(usize, &[(&str, bool)], usize)]) -> TrackNfa {
    let reg = TrackRegistry::new(tracks).expect("atom tracks are distinct");
    let mut a = TrackNfa::new(reg);
    for s in 0..states {
        a.add_state(finals.contains(&s));
    }
    a.add_initial(0);
    for (from, bits, to) in edges {
        let mut c = Cube::FULL;
        for (name, v) in bits.iter() {
            let i = a.registry().index_of(name).expect("edge names a known track");
            c = c.with(i, *v);
        }
        a.add_edge(*from as u32, c, *to as u32);
    }
    a
}

/// All nonempty words over the empty registry.
pub fn truth() -> TrackNfa {
    build(vec![], 2, &[1], &[(0, &[], 1), (1, &[], 1)])
}

pub fn falsity() -> TrackNfa {
    TrackNfa::empty_language(TrackRegistry::empty())
}

/// Nonempty words on which every first-order track of `reg` has exactly one 1.
pub fn valid(reg: &TrackRegistry) -> TrackNfa {
    let fo: Vec<usize> = (0..reg.width()).filter(|&i| reg.track(i).kind == TrackKind::FirstOrder).collect();
    let mut a = TrackNfa::new(reg.clone());
    if fo.is_empty() {
        let s0 = a.add_state(false);
        let s1 = a.add_state(true);
        a.add_initial(s0);
        a.add_edge(s0, Cube::FULL, s1);
        a.add_edge(s1, Cube::FULL, s1);
        return a;
    }
    let k = fo.len();
    let full = (1usize << k) - 1;
    for seen in 0..=full {
        a.add_state(seen == full);
    }
    a.add_initial(0);
    let fo_mask = fo.iter().fold(0u64, |m, &i| m | 1 << i);
    for seen in 0..=full {
        let unseen = full & !seen;
        // every subset of the unseen tracks may be hit at this position
        let mut t = unseen;
        loop {
            let value = fo.iter().enumerate().fold(0u64, |m, (j, &i)| m | (((t >> j) & 1) as u64) << i);
            a.add_edge(seen as u32, Cube::new(value, fo_mask), (seen | t) as u32);
            if t == 0 {
                break;
            }
            t = (t - 1) & unseen;
        }
    }
    a
}

pub fn eq(x: &str, y: &str) -> TrackNfa {
    if x == y {
        return valid(&TrackRegistry::new([Track::fo(x)]).unwrap());
    }
    build(
        vec![Track::fo(x), Track::fo(y)],
        2,
        &[1],
        &[(0, &[(x, false), (y, false)], 0), (0, &[(x, true), (y, true)], 1), (1, &[(x, false), (y, false)], 1)],
    )
}

/// `succ(x) = y` with the greatest position its own successor.
pub fn succ(x: &str, y: &str) -> TrackNfa {
    if x == y {
        return last(x);
    }
    build(
        vec![Track::fo(x), Track::fo(y)],
        4,
        &[2, 3],
        &[
            (0, &[(x, false), (y, false)], 0),
            (0, &[(x, true), (y, false)], 1),
            (1, &[(x, false), (y, true)], 2),
            (2, &[(x, false), (y, false)], 2),
            // both at the same position: only if it is the last one
            (0, &[(x, true), (y, true)], 3),
        ],
    )
}

/// `x <= y`, or `x < y` when `strict`.
pub fn le(x: &str, y: &str, strict: bool) -> TrackNfa {
    if x == y {
        let v = valid(&TrackRegistry::new([Track::fo(x)]).unwrap());
        return if strict { TrackNfa::empty_language(v.registry().clone()) } else { v };
    }
    let mut edges: Vec<(usize, &[(&str, bool)], usize)> = vec![];
    let e00 = [(x, false), (y, false)];
    let e10 = [(x, true), (y, false)];
    let e01 = [(x, false), (y, true)];
    let e11 = [(x, true), (y, true)];
    edges.push((0, &e00, 0));
    edges.push((0, &e10, 1));
    edges.push((1, &e00, 1));
    edges.push((1, &e01, 2));
    edges.push((2, &e00, 2));
    if !strict {
        edges.push((0, &e11, 2));
    }
    build(vec![Track::fo(x), Track::fo(y)], 3, &[2], &edges)
}

/// `p(x)` or `x in X`, depending on the kind of `track`.
pub fn member(track: Track, x: &str) -> Result<TrackNfa, AutomataError> {
    TrackRegistry::new([track.clone(), Track::fo(x)])?;
    let p = track.name.as_str();
    Ok(build(
        vec![track.clone(), Track::fo(x)],
        2,
        &[1],
        &[(0, &[(x, false)], 0), (0, &[(x, true), (p, true)], 1), (1, &[(x, false)], 1)],
    ))
}

pub fn first(x: &str) -> TrackNfa {
    build(vec![Track::fo(x)], 2, &[1], &[(0, &[(x, true)], 1), (1, &[(x, false)], 1)])
}

pub fn last(x: &str) -> TrackNfa {
    build(vec![Track::fo(x)], 2, &[1], &[(0, &[(x, false)], 0), (0, &[(x, true)], 1)])
}

/// The position of `x` is `l` modulo `k`.
pub fn modulo(x: &str, k: u32, l: u32) -> TrackNfa {
    let k = k as usize;
    let done = k;
    let mut edges: Vec<(usize, &[(&str, bool)], usize)> = Vec::new();
    let zero = [(x, false)];
    let one = [(x, true)];
    for i in 0..k {
        edges.push((i, &zero, (i + 1) % k));
    }
    edges.push((l as usize, &one, done));
    edges.push((done, &zero, done));
    build(vec![Track::fo(x)], k + 1, &[done], &edges)
}
