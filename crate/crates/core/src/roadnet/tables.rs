//! CPT constants of the road-condition network, in percent, exactly as
//! published. Three rows do not sum to 100 %; they are renormalized at load.

/// Pavement temperature `T` given air temperature `S_T`. Rows S_T1..S_T4,
/// columns T1..T4.
pub const PAVEMENT_TEMPERATURE: [[f64; 4]; 4] = [
    [95.05, 1.84, 0.87, 0.24],
    [41.46, 50.73, 7.54, 0.27],
    [5.07, 22.68, 71.72, 0.53],
    [10.15, 2.87, 51.40, 35.58],
];

/// Road weather `W` given precipitation `P` and pavement temperature `T`.
/// Rows (true, T1..T4) then (false, T1..T4); columns Dry, Wet, Snow.
pub const ROAD_WEATHER: [[f64; 3]; 8] = [
    [5.00, 95.00, 0.00],
    [5.00, 90.00, 5.00],
    [5.00, 20.00, 75.00],
    [5.00, 0.00, 95.00],
    [95.00, 5.00, 0.00],
    [95.00, 2.50, 2.50],
    [95.00, 1.75, 3.25],
    [95.00, 0.00, 5.00],
];

/// Maximum friction `mu_max` given pavement `R` and weather `W`.
/// Rows (Asphalt, Concrete, Cobblestone) x (Dry, Wet, Snow).
pub const MAX_FRICTION: [[f64; 8]; 9] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 15.0, 76.0, 9.0],
    [0.0, 0.0, 0.0, 11.0, 47.0, 36.0, 5.0, 0.0],
    [7.0, 51.0, 3.0, 9.0, 2.0, 1.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, 0.0, 0.0, 7.0, 72.0, 21.0],
    [0.0, 0.0, 0.0, 0.0, 7.0, 87.0, 6.0, 0.0],
    [13.0, 42.0, 26.0, 11.0, 5.0, 2.0, 1.0, 0.0],
    [0.0, 0.0, 0.0, 3.0, 54.0, 42.0, 1.0, 0.0],
    [0.0, 9.0, 72.0, 18.0, 1.0, 0.0, 0.0, 0.0],
    [8.0, 73.0, 18.0, 1.0, 0.0, 0.0, 0.0, 0.0],
];

/// Friction observer output `S_FO` given `mu_max`. Rows mu1..mu8.
pub const FRICTION_OBSERVER: [[f64; 8]; 8] = [
    [99.68, 0.02, 0.00, 0.00, 0.27, 0.00, 0.03, 0.00],
    [71.76, 20.7, 0.21, 0.01, 6.62, 0.00, 0.70, 0.00],
    [55.76, 0.15, 28.37, 9.55, 5.25, 0.00, 0.92, 0.00],
    [17.31, 0.04, 0.1, 56.31, 22.96, 2.85, 0.43, 0.00],
    [10.70, 0.02, 0.03, 0.54, 78.5, 8.91, 1.09, 0.21],
    [5.32, 0.01, 0.02, 0.21, 10.47, 75.01, 8.79, 0.17],
    [2.12, 0.01, 0.01, 0.05, 8.03, 7.84, 81.49, 0.45],
    [0.45, 0.02, 0.02, 0.03, 2.24, 2.59, 19.12, 75.53],
];

/// Road condition sensor level given weather, on asphalt or concrete.
/// Rows Dry, Wet, Snow.
pub const RCS_PAVED: [[f64; 3]; 3] = [
    [95.00, 5.00, 0.00],
    [17.5, 26.25, 56.25],
    [96.00, 4.00, 0.00],
];

/// Road condition sensor level given weather, on cobblestone.
pub const RCS_COBBLESTONE: [[f64; 3]; 3] = [
    [99.00, 1.00, 0.00],
    [99.00, 1.00, 0.00],
    [99.00, 1.00, 0.00],
];
