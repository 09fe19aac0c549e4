//! Worked examples shipped with the library.

pub const COUNTEREXAMPLE32: &str = include_str!("../fixtures/counterexample32.json");
pub const WITHORBIFOLD: &str = include_str!("../fixtures/withorbifold.json");
pub const NOTSEMIDIRECT: &str = include_str!("../fixtures/notsemidirect.json");
pub const BIGEXAMPLE53: &str = include_str!("../fixtures/bigexample53.json");

pub const METRIC_COUNTEREXAMPLE32: &str = include_str!("../fixtures/metric/counterexample32.json");
pub const METRIC_BIGEXAMPLE53: &str = include_str!("../fixtures/metric/bigexample53.json");
pub const METRIC_AVERAGING_DEMO: &str = include_str!("../fixtures/metric/averaging_demo.json");
