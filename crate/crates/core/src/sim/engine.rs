use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::config::{FailureAction, FailureEvent, Mode, SimConfig};
use super::deploy::{deploy, Deployment};
use super::rng::{stream, Stream};
use crate::analysis::{flat_hops_to_sink, nearest_source, verify_sink_path, RoundMetrics, StimulusRecord};
use crate::energy::charge;
use crate::error::ConfigError;
use crate::protocol::{
    density_control_step, duty_cycle_tick, emit_hellos, DensityParams, EnergyState, NodeId, Payload, RadioPower,
    WindowParams,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stimulus {
    pub position: (f64, f64),
    pub round: u64,
}

/// A broadcast sent during a round.
#[derive(Debug, Clone, PartialEq)]
pub struct Envelope {
    pub payload: Payload,
    pub sent_round: u64,
}

impl Envelope {
    pub fn sender(&self) -> NodeId {
        self.payload.sender()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Transition {
    pub node: NodeId,
    pub from: EnergyState,
    pub to: EnergyState,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundReport {
    pub metrics: RoundMetrics,
    pub envelopes: Vec<Envelope>,
    /// `(envelope index, receiver)`; filled only when delivery tracing is on.
    pub deliveries: Vec<(usize, NodeId)>,
    pub transitions: Vec<Transition>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SensingOutcome {
    pub sensing_count: usize,
    pub sensed: bool,
}

/// Count the awake sensing nodes covering a stimulus.
pub fn sense_stimulus(deployment: &Deployment, stimulus: &Stimulus, k: usize) -> SensingOutcome {
    let sensing_count = deployment
        .within_range(stimulus.position)
        .filter(|n| n.is_sensing())
        .count();
    SensingOutcome {
        sensing_count,
        sensed: sensing_count >= k,
    }
}

/// Uniform stimuli over the area and the run, in round order.
pub fn generate_stimuli(config: &SimConfig) -> Vec<Stimulus> {
    let mut rng = stream(config.seed, Stream::Stimuli);
    let side = config.area_side;
    let mut v: Vec<Stimulus> = (0..config.stimuli_count)
        .map(|_| Stimulus {
            position: (rng.random_range(0.0..side), rng.random_range(0.0..side)),
            round: if config.rounds == 0 {
                0
            } else {
                rng.random_range(0..config.rounds)
            },
        })
        .collect();
    v.sort_by_key(|s| s.round);
    v
}

/// Apply the schedule entries of `round`. Events for nodes that already ran
/// out of energy are ignored.
pub fn inject_failures(deployment: &mut Deployment, events: &[FailureEvent], round: u64) -> Vec<Transition> {
    let mut out = Vec::new();
    for e in events.iter().filter(|e| e.round == round) {
        let node = &mut deployment.nodes[e.node.index()];
        if node.state == EnergyState::Dead || node.is_sink {
            continue;
        }
        match e.action {
            FailureAction::Crash if !node.crashed => node.crash(),
            FailureAction::Recover if node.crashed => {
                let from = node.state;
                node.recover();
                if from != node.state {
                    out.push(Transition {
                        node: node.id,
                        from,
                        to: node.state,
                    });
                }
            }
            _ => {}
        }
    }
    out
}

/// A running scenario: deployment, clock, stimuli and private RNG streams.
#[derive(Debug, Clone)]
pub struct Simulation {
    config: SimConfig,
    deployment: Deployment,
    stimuli: Vec<Stimulus>,
    next_stimulus: usize,
    round: u64,
    loss: ChaCha8Rng,
    jitter: ChaCha8Rng,
    flush: ChaCha8Rng,
    window: WindowParams,
    density: DensityParams,
    staleness: u64,
    trace: bool,
    log: Vec<StimulusRecord>,
}

impl Simulation {
    pub fn new(config: SimConfig) -> Result<Self, ConfigError> {
        let mut deployment = deploy(&config)?;
        if config.mode == Mode::WithoutSand {
            for n in deployment.nodes.iter_mut().filter(|n| !n.is_sink) {
                n.state = EnergyState::RouterSensor;
                n.radio = RadioPower::On;
            }
        }
        let timing = config.timing;
        Ok(Self {
            stimuli: generate_stimuli(&config),
            next_stimulus: 0,
            round: 0,
            loss: stream(config.seed, Stream::Loss),
            jitter: stream(config.seed, Stream::Jitter),
            flush: stream(config.seed, Stream::Flush),
            window: WindowParams::from_timing(&timing),
            density: DensityParams {
                k: config.reliability_k,
                threshold: config.sleep_threshold,
                reissue_window: u64::from(timing.period()),
            },
            staleness: timing.neighbor_staleness(),
            trace: false,
            log: Vec::new(),
            deployment,
            config,
        })
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn deployment(&self) -> &Deployment {
        &self.deployment
    }

    /// Mutable access for tests and tools that stage custom topologies.
    pub fn deployment_mut(&mut self) -> &mut Deployment {
        &mut self.deployment
    }

    /// Index of the next round to run.
    pub fn round(&self) -> u64 {
        self.round
    }

    pub fn is_finished(&self) -> bool {
        self.round >= self.config.rounds
    }

    pub fn stimuli(&self) -> &[Stimulus] {
        &self.stimuli
    }

    /// Outcomes of the stimuli processed so far.
    pub fn stimulus_log(&self) -> &[StimulusRecord] {
        &self.log
    }

    /// Record every individual delivery in [`RoundReport::deliveries`].
    pub fn set_trace_deliveries(&mut self, on: bool) {
        self.trace = on;
    }

    /// Run the remaining rounds and return their metrics.
    pub fn run(&mut self) -> Vec<RoundMetrics> {
        let mut out = Vec::with_capacity((self.config.rounds - self.round.min(self.config.rounds)) as usize);
        while !self.is_finished() {
            out.push(self.run_round().metrics);
        }
        out
    }

    /// Advance one round.
    pub fn run_round(&mut self) -> RoundReport {
        let round = self.round;
        let mut transitions = inject_failures(&mut self.deployment, &self.config.failure_schedule.events, round);
        let (envelopes, deliveries) = match self.config.mode {
            Mode::Sand => self.protocol_round(round, &mut transitions),
            Mode::WithoutSand => (Vec::new(), Vec::new()),
        };
        self.charge_energy(&mut transitions);
        for n in self.deployment.nodes.iter_mut().filter(|n| n.is_alive()) {
            n.advance_clock();
        }
        let mut metrics = RoundMetrics::census(&self.deployment, round);
        self.process_stimuli(round, &mut metrics);
        self.round += 1;
        RoundReport {
            metrics,
            envelopes,
            deliveries,
            transitions,
        }
    }

    fn protocol_round(
        &mut self,
        round: u64,
        transitions: &mut Vec<Transition>,
    ) -> (Vec<Envelope>, Vec<(usize, NodeId)>) {
        let timing = self.config.timing;
        let nodes = &mut self.deployment.nodes;
        let count = nodes.len();

        // (1) radio schedule
        let mut window_done = vec![false; count];
        let mut listening = vec![false; count];
        for n in nodes.iter_mut().filter(|n| n.is_alive() && !n.is_sink) {
            let force = self.config.flush_probability > 0.0
                && n.state == EnergyState::SensorOnly
                && self.flush.random_bool(self.config.flush_probability);
            let tick = duty_cycle_tick(n, &timing, force);
            n.radio = tick.radio;
            let i = n.id.index();
            window_done[i] = tick.window_complete;
            listening[i] = tick.listening;
            if round == 0 {
                // bootstrap: every node starts with a listen window
                n.radio = RadioPower::On;
                window_done[i] = true;
                listening[i] = true;
            }
        }

        // (2) hellos and router orders
        let mut envelopes = Vec::new();
        for n in nodes.iter_mut() {
            if let Some(h) = emit_hellos(n, round, &timing) {
                envelopes.push(Envelope {
                    payload: Payload::Hello(h),
                    sent_round: round,
                });
            }
            if n.is_alive() && !n.is_sink && n.state == EnergyState::RouterSensor {
                n.expire_neighbors(round, self.staleness);
                let view = n.fresh_neighbor_hellos(round, self.staleness);
                let orders = density_control_step(n, &view, &self.density, round);
                n.record_orders(&orders, round);
                envelopes.extend(orders.into_iter().map(|o| Envelope {
                    payload: Payload::Order(o),
                    sent_round: round,
                }));
            }
        }

        // (3) one-hop delivery within the round
        let mut deliveries = Vec::new();
        let adjacency = &self.deployment.adjacency;
        for (ei, env) in envelopes.iter().enumerate() {
            for &v in &adjacency[env.sender().index()] {
                let node = &mut nodes[v.index()];
                if !node.is_alive() || node.is_sink || !node.radio.is_on() {
                    continue;
                }
                if self.config.drop_probability > 0.0 && self.loss.random_bool(self.config.drop_probability) {
                    continue;
                }
                match &env.payload {
                    Payload::Hello(h) => node.receive_hello(h, round, self.staleness),
                    Payload::Order(o) => node.receive_order(o),
                }
                if self.trace {
                    deliveries.push((ei, v));
                }
            }
        }

        // (4) end-of-window decisions
        for n in nodes.iter_mut().filter(|n| n.is_alive() && !n.is_sink) {
            let i = n.id.index();
            if window_done[i] {
                let from = n.state;
                let to = n.complete_window(&self.window).target(from);
                if to != from {
                    n.set_state(to);
                    transitions.push(Transition { node: n.id, from, to });
                }
            } else if !listening[i] {
                // traffic caught outside a listen window is not acted upon
                n.clear_window();
            }
        }
        (envelopes, deliveries)
    }

    /// (5) bill the state each node held while the round ran, with the
    /// radio setting chosen at the start of the round.
    fn charge_energy(&mut self, transitions: &mut Vec<Transition>) {
        let table = self.config.cost_table;
        let mut held: Vec<Option<EnergyState>> = vec![None; self.deployment.nodes.len()];
        for t in transitions.iter() {
            held[t.node.index()] = Some(t.from);
        }
        for n in self.deployment.nodes.iter_mut().filter(|n| n.is_alive() && !n.is_sink) {
            let state = held[n.id.index()].unwrap_or(n.state);
            let jitter = if self.config.energy_jitter {
                self.jitter.random_range(0.95..=1.05)
            } else {
                1.0
            };
            let from = n.state;
            let radio = n.radio;
            charge(n, state, radio, &table, jitter);
            if n.state == EnergyState::Dead {
                transitions.push(Transition {
                    node: n.id,
                    from,
                    to: EnergyState::Dead,
                });
            }
        }
    }

    fn process_stimuli(&mut self, round: u64, metrics: &mut RoundMetrics) {
        while let Some(s) = self.stimuli.get(self.next_stimulus).copied() {
            if s.round > round {
                break;
            }
            self.next_stimulus += 1;
            let sense = sense_stimulus(&self.deployment, &s, self.config.reliability_k);
            let source = nearest_source(&self.deployment, s.position);
            let (connected, hops, flat) = match source {
                Some(src) => {
                    let outcome = verify_sink_path(&self.deployment, src).expect("source is sensing");
                    (
                        outcome.is_connected(),
                        outcome.hops(),
                        flat_hops_to_sink(&self.deployment, src).hops(),
                    )
                }
                None => (false, None, None),
            };
            metrics.stimuli_total += 1;
            metrics.stimuli_sensed += usize::from(sense.sensed);
            metrics.paths_checked += 1;
            if let Some(h) = hops {
                metrics.paths_ok += 1;
                metrics.path_lengths.push(h);
            }
            self.log.push(StimulusRecord {
                round,
                position: s.position,
                sensing_count: sense.sensing_count,
                sensed: sense.sensed,
                source,
                connected,
                hops,
                flat_hops: flat,
            });
        }
    }
}
