//! Independent oracles used by the test suites. None of them reuse the
//! normal-form shortcuts of the library: distances come from Dijkstra on an
//! explicitly built graph, volumes from the Leibniz formula, geodesic flows
//! from enumerating every shortest path.

pub mod cayley;
pub mod coned_ball;
pub mod det;
pub mod freered;
pub mod models;
pub mod orbit;
