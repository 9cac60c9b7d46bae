//! FCFS single-server queue, computed three ways.
//!
//! [`lindley_arrivals`] is the route used by the simulator. The waiting-time
//! form and the event-list simulation are independent routes to the same
//! arrival times.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::scalar::Scalar;

/// `a_k = max(d_k, a_{k-1}) + S_k`.
pub fn lindley_arrivals<T: Scalar>(departures: &[T], services: &[T]) -> Vec<T> {
    assert_eq!(departures.len(), services.len());
    let mut out: Vec<T> = Vec::with_capacity(departures.len());
    for (d, s) in departures.iter().zip(services) {
        let start = match out.last() {
            Some(prev) => d.clone().max_of(prev.clone()),
            None => d.clone(),
        };
        out.push(start + s.clone());
    }
    out
}

/// `a_k = d_k + W_k + S_k` with `W_k = max(0, Y_{k-1} - X_k)`, where
/// `Y = a - d` is the system time and `X` the inter-generation gap.
pub fn waiting_time_arrivals<T: Scalar>(departures: &[T], services: &[T]) -> Vec<T> {
    assert_eq!(departures.len(), services.len());
    let mut out: Vec<T> = Vec::with_capacity(departures.len());
    let mut prev: Option<(T, T)> = None;
    for (d, s) in departures.iter().zip(services) {
        let wait = match &prev {
            Some((pd, py)) => {
                let gap = d.clone() - pd.clone();
                (py.clone() - gap).max_of(T::zero())
            }
            None => T::zero(),
        };
        let system_time = wait + s.clone();
        out.push(d.clone() + system_time.clone());
        prev = Some((d.clone(), system_time));
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
enum EventKind {
    Completion,
    Generation(usize),
}

#[derive(Debug, Clone)]
struct Event<T> {
    time: T,
    kind: EventKind,
}

impl<T: PartialOrd> PartialEq for Event<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<T: PartialOrd> Eq for Event<T> {}

impl<T: PartialOrd> PartialOrd for Event<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: PartialOrd> Ord for Event<T> {
    // Min-heap on time; completions before generations on ties.
    fn cmp(&self, other: &Self) -> Ordering {
        let by_time = other
            .time
            .partial_cmp(&self.time)
            .expect("event times are comparable");
        let rank = |k: &EventKind| match k {
            EventKind::Completion => 0usize,
            EventKind::Generation(i) => 1 + i,
        };
        by_time.then_with(|| rank(&other.kind).cmp(&rank(&self.kind)))
    }
}

/// Event-list simulation of the queue. Processing stops at `horizon` (the
/// failure): packets whose service would complete after it are dropped
/// together with everything still waiting.
pub fn event_driven_arrivals<T: Scalar>(
    departures: &[T],
    services: &[T],
    horizon: Option<&T>,
) -> Vec<T> {
    assert_eq!(departures.len(), services.len());
    let mut events: BinaryHeap<Event<T>> = departures
        .iter()
        .enumerate()
        .map(|(i, d)| Event {
            time: d.clone(),
            kind: EventKind::Generation(i),
        })
        .collect();
    let mut waiting = std::collections::VecDeque::new();
    let mut in_service: Option<usize> = None;
    let mut arrivals = Vec::new();

    while let Some(ev) = events.pop() {
        if horizon.is_some_and(|h| ev.time > *h) {
            break;
        }
        match ev.kind {
            EventKind::Generation(i) => {
                if in_service.is_none() {
                    in_service = Some(i);
                    events.push(Event {
                        time: ev.time + services[i].clone(),
                        kind: EventKind::Completion,
                    });
                } else {
                    waiting.push_back(i);
                }
            }
            EventKind::Completion => {
                arrivals.push(ev.time.clone());
                in_service = waiting.pop_front();
                if let Some(next) = in_service {
                    events.push(Event {
                        time: ev.time + services[next].clone(),
                        kind: EventKind::Completion,
                    });
                }
            }
        }
    }
    arrivals
}
