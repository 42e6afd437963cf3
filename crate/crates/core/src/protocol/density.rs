//! Sensing-density control run by routers.
//!
//! A router keeps the estimated lifetimes announced by its sensor-only
//! neighbors and the last value announced by every neighbor it put to sleep.
//! Nodes in the low tail of the lifetime distribution are sent to sleep;
//! sleepers with above-average lifetimes are woken when too few sensing nodes
//! remain.

use super::{EnergyState, HelloPayload, NodeId, NodeRecord, OrderKind, OrderPayload};

/// How the sleep cut-off is derived from the lifetime statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SleepThreshold {
    /// `el < mean - sigma`.
    #[default]
    MeanMinusSigma,
    /// `el < sigma`, comparing a lifetime with the raw deviation.
    Sigma,
}

impl SleepThreshold {
    pub fn name(self) -> &'static str {
        match self {
            SleepThreshold::MeanMinusSigma => "mean_minus_sigma",
            SleepThreshold::Sigma => "sigma",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "mean_minus_sigma" => Some(SleepThreshold::MeanMinusSigma),
            "sigma" => Some(SleepThreshold::Sigma),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityParams {
    /// Required number of sensing nodes in the router's range, router included.
    pub k: usize,
    pub threshold: SleepThreshold,
    /// Rounds during which a sleep order is repeated before the target is
    /// assumed asleep.
    pub reissue_window: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElStatistics {
    /// Mean over awake sensor-only lifetimes and recorded sleeper lifetimes.
    pub mean: Option<f64>,
    /// Population standard deviation of the awake lifetimes below the mean.
    pub sigma_below: Option<f64>,
    /// Sleep cut-off; absent when no awake sensor-only lifetime is known.
    pub threshold: Option<f64>,
}

pub fn el_statistics(awake: &[u64], sleepers: &[u64], rule: SleepThreshold) -> ElStatistics {
    let n = awake.len() + sleepers.len();
    if n == 0 {
        return ElStatistics {
            mean: None,
            sigma_below: None,
            threshold: None,
        };
    }
    let total: f64 = awake.iter().chain(sleepers).map(|&e| e as f64).sum();
    let mean = total / n as f64;
    if awake.is_empty() {
        return ElStatistics {
            mean: Some(mean),
            sigma_below: None,
            threshold: None,
        };
    }
    let below: Vec<f64> = awake.iter().map(|&e| e as f64).filter(|&e| e < mean).collect();
    let sigma = if below.is_empty() {
        0.0
    } else {
        let m = below.iter().sum::<f64>() / below.len() as f64;
        (below.iter().map(|e| (e - m) * (e - m)).sum::<f64>() / below.len() as f64).sqrt()
    };
    let threshold = match rule {
        SleepThreshold::MeanMinusSigma => mean - sigma,
        SleepThreshold::Sigma => sigma,
    };
    ElStatistics {
        mean: Some(mean),
        sigma_below: Some(sigma),
        threshold: Some(threshold),
    }
}

/// Orders a router sends this round.
///
/// `neighbor_hellos` is the router's current view of its neighborhood, one
/// hello per neighbor. Sensor-only neighbors the router already ordered to
/// sleep count as asleep. A sleep order goes out only if
///
/// * at least `k` sensing nodes stay awake in range, and
/// * every sleeper of this router is matched by a distinct awake sensor-only
///   neighbor that replaces it.
///
/// Sleep orders not yet known to be obeyed are repeated for
/// `reissue_window` rounds. Wake orders go to every recorded sleeper whose
/// lifetime exceeds the mean while fewer than `k` nodes are awake.
pub fn density_control_step(
    router: &NodeRecord,
    neighbor_hellos: &[HelloPayload],
    params: &DensityParams,
    round: u64,
) -> Vec<OrderPayload> {
    if router.state != EnergyState::RouterSensor {
        return Vec::new();
    }
    let mut awake_so: Vec<(NodeId, u64)> = Vec::new();
    let mut awake_forwarders = 0usize;
    for h in neighbor_hellos.iter().filter(|h| h.sender != router.id) {
        match h.state {
            EnergyState::SensorOnly if !router.sleepers.contains_key(&h.sender) => {
                awake_so.push((h.sender, h.el));
            }
            EnergyState::RouterSensor | EnergyState::Gateway => awake_forwarders += 1,
            _ => {}
        }
    }
    awake_so.sort_unstable();
    awake_so.dedup_by_key(|(id, _)| *id);

    let awake_els: Vec<u64> = awake_so.iter().map(|&(_, el)| el).collect();
    let sleeper_els: Vec<u64> = router.sleepers.values().map(|s| s.el).collect();
    let stats = el_statistics(&awake_els, &sleeper_els, params.threshold);
    let average = stats.mean.unwrap_or(0.0);
    let order = |kind, target| OrderPayload {
        sender: router.id,
        kind,
        target,
        average_el: average,
    };

    let mut orders: Vec<OrderPayload> = router
        .sleepers
        .iter()
        .filter(|(_, s)| round.saturating_sub(s.ordered_at) <= params.reissue_window)
        .map(|(&id, _)| order(OrderKind::SwitchToSleep, id))
        .collect();

    let mut awake = 1 + awake_so.len() + awake_forwarders;
    if awake < params.k {
        if let Some(mean) = stats.mean {
            orders.extend(
                router
                    .sleepers
                    .iter()
                    .filter(|(_, s)| round.saturating_sub(s.ordered_at) > params.reissue_window)
                    .filter(|(_, s)| s.el as f64 > mean)
                    .map(|(&id, _)| order(OrderKind::SwitchToSensor, id)),
            );
        }
        return orders;
    }

    let Some(threshold) = stats.threshold else {
        return orders;
    };
    let mut candidates: Vec<(u64, NodeId)> = awake_so
        .iter()
        .filter(|&&(_, el)| (el as f64) < threshold)
        .map(|&(id, el)| (el, id))
        .collect();
    candidates.sort_unstable();
    let mut so_left = awake_so.len();
    let mut sleeping = router.sleepers.len();
    for (_, id) in candidates {
        if awake <= params.k || so_left <= sleeping + 1 {
            break;
        }
        orders.push(order(OrderKind::SwitchToSleep, id));
        awake -= 1;
        so_left -= 1;
        sleeping += 1;
    }
    orders
}
