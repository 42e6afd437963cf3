use super::{NodeRecord, RadioPower, TimingConstants};

/// Radio decision for one round.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DutyTick {
    pub radio: RadioPower,
    /// The node's listen window ends with this round.
    pub window_complete: bool,
    /// The round is part of a listen window, as opposed to a forced wake-up.
    pub listening: bool,
}

/// Advance a node's radio schedule by one round.
///
/// Sleep and sensor-only nodes listen for `t_on` rounds, then switch the
/// radio off for `t_off` rounds. Routers and gateways never turn the radio
/// off; their windows complete every `t_on` rounds. The duty schedule keeps
/// ticking underneath so a node that falls back to sensor-only resumes its
/// original phase. `force_on` keeps the radio up for the round (pending local
/// data) without completing a window.
pub fn duty_cycle_tick(node: &mut NodeRecord, timing: &TimingConstants, force_on: bool) -> DutyTick {
    if !node.is_alive() {
        return DutyTick {
            radio: RadioPower::Off,
            window_complete: false,
            listening: false,
        };
    }
    let (scheduled_on, scheduled_end) = advance_schedule(node, timing);
    if node.state.is_forwarding() {
        node.window_age += 1;
        let done = node.window_age >= timing.t_on;
        if done {
            node.window_age = 0;
        }
        return DutyTick {
            radio: RadioPower::On,
            window_complete: done,
            listening: true,
        };
    }
    let radio = if scheduled_on || force_on {
        RadioPower::On
    } else {
        RadioPower::Off
    };
    DutyTick {
        radio,
        window_complete: scheduled_end,
        listening: scheduled_on,
    }
}

/// Returns (on this round, window ends this round).
fn advance_schedule(node: &mut NodeRecord, timing: &TimingConstants) -> (bool, bool) {
    if node.listen_remaining == 0 {
        if node.wake_phase > 0 {
            node.wake_phase -= 1;
            return (false, false);
        }
        node.listen_remaining = timing.t_on;
    }
    node.listen_remaining -= 1;
    let end = node.listen_remaining == 0;
    if end {
        node.wake_phase = timing.t_off;
    }
    (true, end)
}
