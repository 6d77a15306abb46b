//! Event lists with embedded generation truth.

/// One detected positron impact in emulsion coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    /// Transverse-to-fringe coordinate, um.
    pub u_um: f64,
    /// Scan (tilt) coordinate, um.
    pub s_um: f64,
}

/// Generation truth carried alongside synthetic events for round-trip tests.
#[derive(Debug, Clone, PartialEq)]
pub struct GenerationTruth {
    /// Model tag: "quantum", "classical" or "synthetic".
    pub model: String,
    /// Beam energy, keV (0 for energy-blind models).
    pub energy_kev: f64,
    /// Noise-free fringe contrast at the s = 0 plane.
    pub contrast: f64,
    /// Fringe period at the s = 0 plane, um.
    pub period_um: f64,
    /// Applied fringe-detector rotation, mrad.
    pub rotation_mrad: f64,
    /// Applied position smearing, um.
    pub sigma_um: f64,
}

/// Ordered event sample plus the seed and truth that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct EventList {
    pub events: Vec<Event>,
    pub seed: u64,
    pub truth: Option<GenerationTruth>,
}

impl EventList {
    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }
}
