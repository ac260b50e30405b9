//! World-wide mass and energy bookkeeping.
//!
//! Photosynthesis creates mass and energy and digestion releases energy.
//! Everything that leaves the world goes through a named sink. Over any
//! window, `Δ(total) = credits - sinks` up to rounding.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Source {
    Photosynthesis,
    Digestion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Sink {
    Decay,
    Diffusion,
    Construction,
    Repair,
    Division,
    Actuation,
    Growth,
    Production,
}

impl Sink {
    pub const ALL: [Sink; 8] = [
        Sink::Decay,
        Sink::Diffusion,
        Sink::Construction,
        Sink::Repair,
        Sink::Division,
        Sink::Actuation,
        Sink::Growth,
        Sink::Production,
    ];
}

/// One quantity (mass or energy) tallied by source and sink.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Account {
    pub credits: BTreeMap<Source, f64>,
    pub sinks: BTreeMap<Sink, f64>,
}

impl Account {
    pub fn credit(&mut self, s: Source, amount: f64) {
        debug_assert!(amount.is_finite());
        if amount != 0.0 {
            *self.credits.entry(s).or_default() += amount;
        }
    }

    pub fn sink(&mut self, s: Sink, amount: f64) {
        debug_assert!(amount.is_finite());
        if amount != 0.0 {
            *self.sinks.entry(s).or_default() += amount;
        }
    }

    pub fn total_credits(&self) -> f64 {
        self.credits.values().sum()
    }

    pub fn total_sinks(&self) -> f64 {
        self.sinks.values().sum()
    }

    pub fn net(&self) -> f64 {
        self.total_credits() - self.total_sinks()
    }

    pub fn merge(&mut self, other: &Account) {
        for (k, v) in &other.credits {
            self.credit(*k, *v);
        }
        for (k, v) in &other.sinks {
            self.sink(*k, *v);
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Ledger {
    pub mass: Account,
    pub energy: Account,
}

impl Ledger {
    pub fn merge(&mut self, other: &Ledger) {
        self.mass.merge(&other.mass);
        self.energy.merge(&other.energy);
    }
}

/// `|Δtotal - net| / max(|total|, floor)`.
pub fn relative_residual(start: f64, now: f64, net: f64) -> f64 {
    ((now - start) - net).abs() / now.abs().max(start.abs()).max(1e-12)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn net_is_credits_minus_sinks() {
        let mut a = Account::default();
        a.credit(Source::Photosynthesis, 2.0);
        a.sink(Sink::Decay, 0.5);
        a.sink(Sink::Decay, 0.25);
        assert_eq!(a.net(), 1.25);
        assert_eq!(relative_residual(10.0, 11.25, a.net()), 0.0);
    }
}
