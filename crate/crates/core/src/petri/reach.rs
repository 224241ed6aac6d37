use std::collections::{HashSet, VecDeque};

use super::{Marking, MarkedPetriNet, PetriError};

/// All markings reachable from the initial one, sorted. Every marking is
/// checked for 1-safety and, when `decomposable` is set, for carrying
/// exactly one token per `(type, slot)` group.
pub fn reachable_markings(net: &MarkedPetriNet, cap: usize, decomposable: bool) -> Result<Vec<Marking>, PetriError> {
    let groups = net.groups();
    let check = |m: &Marking| -> Result<(), PetriError> {
        if decomposable && !groups.iter().all(|g| g.iter().filter(|&&p| m.get(p)).count() == 1) {
            return Err(PetriError::NotDecomposable(net.marking_names(m).join(" ")));
        }
        Ok(())
    };
    let mut seen: HashSet<Marking> = HashSet::new();
    let mut queue = VecDeque::new();
    check(&net.initial)?;
    seen.insert(net.initial.clone());
    queue.push_back(net.initial.clone());
    while let Some(m) = queue.pop_front() {
        for t in 0..net.transitions.len() {
            if !net.enabled(&m, t) {
                continue;
            }
            let next = net.fire(&m, t)?;
            if seen.contains(&next) {
                continue;
            }
            check(&next)?;
            if seen.len() >= cap {
                return Err(PetriError::MarkingCap(cap));
            }
            seen.insert(next.clone());
            queue.push_back(next);
        }
    }
    let mut out: Vec<Marking> = seen.into_iter().collect();
    out.sort();
    Ok(out)
}
