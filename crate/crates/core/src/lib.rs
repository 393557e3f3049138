//! Beliefs, jackpots, synthetic gambler populations, transaction logs and the
//! estimators used to study learning from betting results.

pub mod belief;
pub mod econlab;
pub mod jackpot;
pub mod panel;
pub mod simulator;
pub mod txlog;
