#include "phc/model/facility.hpp"

#include <cmath>

namespace phc::model {

using sim::Minutes;
using sim::minutes_per_day;
using sim::PriorityResource;
using sim::RandomStream;
using sim::Tier;

// One stream per stochastic process, so scenarios that change one process
// leave the draws of the others untouched.
struct Facility::Streams {
  explicit Streams(std::uint64_t s)
      : opd_arrival(s, "opd.arrival"),
        age(s, "opd.age"),
        lab_referral(s, "opd.lab_referral"),
        point_of_care(s, "opd.point_of_care"),
        followup(s, "opd.followup"),
        followup_gap(s, "opd.followup_gap"),
        ncd_check(s, "ncd.check"),
        ncd_assist(s, "ncd.assist"),
        consult(s, "doctor.consult"),
        lab(s, "lab.service"),
        report_delay(s, "lab.report_delay"),
        pharmacy(s, "pharmacy.service"),
        ipd_arrival(s, "ipd.arrival"),
        doctor_inpatient(s, "doctor.inpatient"),
        nurse_inpatient(s, "nurse.inpatient"),
        inpatient_bed(s, "bed.inpatient"),
        cb_arrival(s, "childbirth.arrival"),
        nurse_childbirth(s, "nurse.childbirth"),
        doctor_childbirth(s, "doctor.childbirth"),
        labour_bed(s, "bed.labour"),
        postdelivery_bed(s, "bed.postdelivery"),
        cb_mix(s, "childbirth.mix"),
        anc_arrival(s, "anc.arrival"),
        anc_nurse(s, "anc.nurse"),
        anc_gap(s, "anc.gap"),
        doctor_admin(s, "admin.doctor"),
        ncd_admin(s, "admin.ncd") {}

  RandomStream opd_arrival, age, lab_referral, point_of_care, followup, followup_gap, ncd_check,
      ncd_assist, consult, lab, report_delay, pharmacy;
  RandomStream ipd_arrival, doctor_inpatient, nurse_inpatient, inpatient_bed;
  RandomStream cb_arrival, nurse_childbirth, doctor_childbirth, labour_bed, postdelivery_bed, cb_mix;
  RandomStream anc_arrival, anc_nurse, anc_gap;
  RandomStream doctor_admin, ncd_admin;
};

Facility::Facility(PhcConfiguration config, std::uint64_t seed, std::vector<TraceRecord>* trace)
    : config_(std::move(config)), streams_(std::make_unique<Streams>(seed)), trace_(trace) {
  config_.validate();
}

Facility::~Facility() = default;

void Facility::start(sim::Simulation& sim) {
  sim_ = &sim;
  const auto& c = config_;
  doctor_ = std::make_unique<PriorityResource>(sim, "doctor", c.n_doctors);
  ncd_nurse_ = std::make_unique<PriorityResource>(sim, "ncd_nurse", 1);
  // One staff nurse on duty at any instant; shifts hand over without a gap.
  staff_nurse_ = std::make_unique<PriorityResource>(sim, "staff_nurse", 1);
  pharmacy_ = std::make_unique<PriorityResource>(sim, "pharmacy", 1);
  lab_ = std::make_unique<PriorityResource>(sim, "lab", 1);
  inpatient_beds_ = std::make_unique<PriorityResource>(sim, "inpatient_bed", std::max(1, c.n_inpatient_beds));
  labour_beds_ = std::make_unique<PriorityResource>(sim, "labour_bed", std::max(1, c.n_labour_beds));

  if (c.opd_enabled()) sim.spawn(opd_arrivals());
  if (c.ipd_interarrival_mean) sim.spawn(ipd_arrivals());
  if (c.childbirth_enabled()) sim.spawn(childbirth_arrivals());
  if (c.anc_enabled()) sim.spawn(anc_arrivals());
  if (c.include_admin) {
    sim.spawn(daily_admin());
    sim.spawn(nurse_shift_admin());
  }
}

void Facility::reset_statistics(sim::Simulation&) {
  for (auto* r : {doctor_.get(), ncd_nurse_.get(), staff_nurse_.get(), pharmacy_.get(), lab_.get(),
                  inpatient_beds_.get(), labour_beds_.get()}) {
    r->reset_statistics();
  }
  steady_ = true;
  opd_visits_ = childbirth_arrivals_ = admitted_ = referred_ = 0;
  audit_.doctor_service_minutes = 0.0;
  audit_.doctor_admin_added = 0.0;
}

ReplicationOutcome Facility::collect(sim::Simulation& sim) {
  const auto& c = config_;
  const Minutes from = doctor_->statistics_since();
  const Minutes to = sim.now();
  const double span = to - from;
  const double days = span / minutes_per_day;
  const double nan = std::numeric_limits<double>::quiet_NaN();

  auto opd_util = [&](const PriorityResource& r, double busy) {
    return sim::utilization(busy, c.opd_window.scheduled_minutes(from, to, static_cast<double>(r.capacity())));
  };
  auto day_util = [&](const PriorityResource& r) {
    return sim::utilization(r.busy_minutes(), span * static_cast<double>(r.capacity()));
  };

  ReplicationOutcome out;
  out[Metric::doctor_utilization] = opd_util(*doctor_, doctor_->busy_minutes());
  out[Metric::doctor_patient_utilization] = opd_util(*doctor_, doctor_->request_busy_minutes());
  out[Metric::ncd_nurse_utilization] = opd_util(*ncd_nurse_, ncd_nurse_->busy_minutes());
  out[Metric::pharmacist_utilization] = opd_util(*pharmacy_, pharmacy_->busy_minutes());
  out[Metric::lab_utilization] = opd_util(*lab_, lab_->busy_minutes());
  out[Metric::staff_nurse_utilization] = day_util(*staff_nurse_);
  out[Metric::inpatient_bed_utilization] = c.n_inpatient_beds > 0 ? day_util(*inpatient_beds_) : nan;
  out[Metric::labour_bed_utilization] = c.childbirth_enabled() ? day_util(*labour_beds_) : nan;
  out[Metric::opd_queue_length] = doctor_->mean_queue_length();
  out[Metric::opd_wait] = doctor_->waits(Tier::low).mean();
  out[Metric::pharmacy_queue_length] = pharmacy_->mean_queue_length();
  out[Metric::pharmacy_wait] = pharmacy_->waits().mean();
  out[Metric::lab_queue_length] = lab_->mean_queue_length();
  out[Metric::lab_wait] = lab_->waits().mean();
  const auto decided = admitted_ + referred_;
  out[Metric::referral_fraction] =
      c.childbirth_enabled() ? (decided ? static_cast<double>(referred_) / static_cast<double>(decided) : 0.0)
                             : nan;
  out[Metric::outpatient_visits_per_day] = static_cast<double>(opd_visits_) / days;
  out[Metric::childbirth_cases_per_day] = static_cast<double>(childbirth_arrivals_) / days;
  out.audit = audit_;
  return out;
}

// --- helpers ---------------------------------------------------------------

void Facility::trace(const PatientRecord& p, std::string_view resource, std::string_view event) {
  if (trace_) trace_->push_back({sim_->now(), p.id, p.patient_class, resource, event});
}

void Facility::admit(PatientRecord& p) {
  const auto k = static_cast<int>(p.patient_class);
  ++audit_.arrivals[k];
  ++audit_.in_system[k];
  trace(p, "facility", "arrive");
}

void Facility::discharge(PatientRecord& p, Disposition d) {
  const auto k = static_cast<int>(p.patient_class);
  p.disposition = d;
  --audit_.in_system[k];
  if (d == Disposition::completed) ++audit_.completed[k];
  else ++audit_.referred[k];
  trace(p, "facility", d == Disposition::completed ? "depart" : "referred_out");
}

sim::Task Facility::serve(PriorityResource& r, Tier tier, Minutes duration, PatientRecord& p,
                          std::string_view name) {
  trace(p, name, "queue");
  const sim::Grant g = co_await r.acquire(tier);
  const bool outpatient_unit = &r == doctor_.get() || &r == ncd_nurse_.get() || &r == pharmacy_.get() ||
                               &r == lab_.get();
  if (outpatient_unit && !config_.opd_window.is_open(p.arrival_time)) ++audit_.after_close_starts;
  if (&r == doctor_.get() && steady_) audit_.doctor_service_minutes += duration;
  trace(p, name, "start");
  co_await sim_->delay(duration);
  r.release(g);
  trace(p, name, "end");
}

sim::Process Facility::attend(PriorityResource& r, Tier tier, Minutes duration, PatientRecord p,
                              std::string_view name) {
  co_await serve(r, tier, duration, p, name);
}

double Facility::childbirth_doctor_scale() {
  const auto& f = config_.interventions;
  if (!f.childbirth_mix) return 1.0;
  const double u = streams_->cb_mix.uniform01();
  if (u < f.mix.p_none) return 0.0;
  if (u < f.mix.p_none + f.mix.p_one_third) return 1.0 / 3.0;
  return 1.0;
}

// --- arrival generators ---------------------------------------------------

sim::Process Facility::opd_arrivals() {
  auto& s = streams_->opd_arrival;
  const sim::Exponential gap{*config_.opd_interarrival_mean};
  double open_time = 0.0;
  for (;;) {
    open_time += sim::sample(s, gap);
    co_await sim_->until(config_.opd_window.from_open_time(open_time));
    PatientRecord p;
    p.id = next_patient_id_++;
    p.patient_class = PatientClass::outpatient;
    p.age_30_plus = streams_->age.bernoulli(config_.p_age_30_plus);
    p.visit_index = 1;
    int planned = 1;
    if (config_.include_followups && config_.followup_mode == FollowupMode::exclusive) {
      const double u = streams_->followup.uniform01();
      if (u < config_.p_followup_three_visits) planned = 3;
      else if (u < config_.p_followup_three_visits + config_.p_followup_two_visits) planned = 2;
    }
    sim_->spawn(outpatient_visit(p, planned));
  }
}

sim::Process Facility::ipd_arrivals() {
  const sim::Exponential gap{*config_.ipd_interarrival_mean};
  for (;;) {
    co_await sim_->delay(sim::sample(streams_->ipd_arrival, gap));
    PatientRecord p;
    p.id = next_patient_id_++;
    p.patient_class = PatientClass::inpatient;
    sim_->spawn(inpatient_pathway(p));
  }
}

sim::Process Facility::childbirth_arrivals() {
  const sim::Exponential gap{*config_.childbirth_interarrival_mean};
  for (;;) {
    co_await sim_->delay(sim::sample(streams_->cb_arrival, gap));
    PatientRecord p;
    p.id = next_patient_id_++;
    p.patient_class = PatientClass::childbirth;
    sim_->spawn(childbirth_pathway(p));
  }
}

sim::Process Facility::anc_arrivals() {
  // The rate is per 24 hours; first visits fall only in OPD hours.
  const double per_open_minute = config_.opd_window.window_length() / minutes_per_day;
  const sim::Exponential gap{*config_.anc_interarrival_mean * per_open_minute};
  double open_time = 0.0;
  for (;;) {
    open_time += sim::sample(streams_->anc_arrival, gap);
    co_await sim_->until(config_.opd_window.from_open_time(open_time));
    PatientRecord p;
    p.id = next_patient_id_++;
    p.patient_class = PatientClass::anc;
    p.visit_index = 1;
    sim_->spawn(anc_visit(p));
  }
}

sim::Process Facility::daily_admin() {
  const auto& c = config_;
  for (int day = 0;; ++day) {
    co_await sim_->until(day * minutes_per_day + c.opd_window.open_minute);
    const double doctor_work = sim::sample(streams_->doctor_admin, c.doctor_admin_total);
    const double ncd_work = sim::sample(streams_->ncd_admin, c.ncd_admin_total);
    if (steady_) audit_.doctor_admin_added += doctor_work;
    if (c.interventions.nurse_takes_doctor_admin) staff_nurse_->add_background_work(doctor_work);
    else doctor_->add_background_work(doctor_work);
    if (c.interventions.nurse_takes_ncd_admin) staff_nurse_->add_background_work(ncd_work);
    else ncd_nurse_->add_background_work(ncd_work);
  }
}

sim::Process Facility::nurse_shift_admin() {
  constexpr double shift = minutes_per_day / 3.0;
  for (long k = 0;; ++k) {
    co_await sim_->until(static_cast<double>(k) * shift);
    staff_nurse_->add_background_work(config_.nurse_admin_per_shift);
  }
}

// --- pathways -------------------------------------------------------------

void Facility::schedule_followup(const PatientRecord& p, int planned_visits) {
  const auto& c = config_;
  if (!c.include_followups || p.visit_index >= 3) return;
  bool again = false;
  if (c.followup_mode == FollowupMode::exclusive) {
    again = p.visit_index < planned_visits;
  } else {
    const double q = p.visit_index == 1 ? c.p_followup_two_visits : c.p_followup_three_visits;
    again = streams_->followup.bernoulli(q);
  }
  if (!again) return;
  const auto gap_days = streams_->followup_gap.uniform_int(c.followup_gap_min_days, c.followup_gap_max_days);
  PatientRecord next = p;
  next.visit_index = p.visit_index + 1;
  next.disposition.reset();
  // Same time of day, gap_days later.
  sim_->schedule(p.arrival_time + static_cast<double>(gap_days) * minutes_per_day,
                 [this, next, planned_visits] { sim_->spawn(outpatient_visit(next, planned_visits)); });
}

sim::Process Facility::outpatient_visit(PatientRecord p, int planned_visits) {
  const auto& c = config_;
  auto& st = *streams_;
  p.arrival_time = sim_->now();
  admit(p);
  if (steady_) ++opd_visits_;
  audit_.max_outpatient_visit_index = std::max(audit_.max_outpatient_visit_index, p.visit_index);
  schedule_followup(p, planned_visits);

  if (p.age_30_plus) {
    const double check = sim::sample(st.ncd_check, c.ncd_check);
    const double assist = c.interventions.nurse_assists_ncd_fraction;
    if (assist > 0.0 && st.ncd_assist.bernoulli(assist)) {
      co_await serve(*staff_nurse_, Tier::low, check, p, "staff_nurse");
    } else {
      co_await serve(*ncd_nurse_, Tier::low, check, p, "ncd_nurse");
    }
  }

  if (st.lab_referral.bernoulli(c.p_lab_referral)) {
    // The doctor only routes the patient to the lab at this first touch.
    co_await serve(*doctor_, Tier::low, 0.0, p, "doctor");
    co_await serve(*lab_, Tier::low, sim::sample(st.lab, c.lab_service), p, "lab");
    bool consult = true;
    if (st.point_of_care.bernoulli(c.p_lab_point_of_care)) {
      co_await sim_->delay(sim::sample(st.report_delay, c.lab_report_delay));
    } else if (c.lab_report_next_day) {
      // Report ready tomorrow: the patient comes back at the same time of day.
      trace(p, "facility", "leave_for_report");
      co_await sim_->until(p.arrival_time + minutes_per_day);
      trace(p, "facility", "return_with_report");
    } else {
      // The report visit is one of the follow-ups.
      consult = false;
    }
    if (consult) {
      co_await serve(*doctor_, Tier::low, sim::sample(st.consult, c.doctor_opd_consult), p, "doctor");
    }
  } else {
    co_await serve(*doctor_, Tier::low, sim::sample(st.consult, c.doctor_opd_consult), p, "doctor");
  }
  ++audit_.pharmacy_visits[static_cast<int>(p.patient_class)];
  co_await serve(*pharmacy_, Tier::low, sim::sample(st.pharmacy, c.pharmacy_service), p, "pharmacy");
  discharge(p, Disposition::completed);
}

sim::Process Facility::inpatient_pathway(PatientRecord p) {
  const auto& c = config_;
  auto& st = *streams_;
  p.arrival_time = sim_->now();
  admit(p);
  // Doctors see inpatients only during OPD hours.
  if (c.opd_window.is_open(p.arrival_time)) {
    co_await serve(*doctor_, Tier::high, sim::sample(st.doctor_inpatient, c.doctor_inpatient), p, "doctor");
  }
  co_await serve(*staff_nurse_, Tier::high, sim::sample(st.nurse_inpatient, c.nurse_inpatient), p,
                 "staff_nurse");
  if (c.inpatient_referral_when_full && inpatient_beds_->holders() == inpatient_beds_->capacity()) {
    discharge(p, Disposition::referred_out);
    co_return;
  }
  ++audit_.bed_stays[static_cast<int>(p.patient_class)];
  co_await serve(*inpatient_beds_, Tier::high, sim::sample(st.inpatient_bed, c.inpatient_bed_stay), p,
                 "inpatient_bed");
  discharge(p, Disposition::completed);
}

sim::Process Facility::childbirth_pathway(PatientRecord p) {
  const auto& c = config_;
  auto& st = *streams_;
  p.arrival_time = sim_->now();
  admit(p);
  if (steady_) ++childbirth_arrivals_;
  const double doctor_scale = childbirth_doctor_scale();
  const double nurse_time = sim::sample(st.nurse_childbirth, c.nurse_childbirth);
  const double doctor_time = sim::sample(st.doctor_childbirth, c.doctor_childbirth) * doctor_scale;

  auto doctor_attends = [&](sim::Minutes at) {
    if (doctor_scale > 0.0 && c.opd_window.is_open(at)) {
      sim_->spawn(attend(*doctor_, Tier::high, doctor_time, p, "doctor"));
    }
  };

  if (c.childbirth_order == ChildbirthOrder::care_then_bed) {
    // Doctor (in hours) and staff nurse attend on arrival; the doctor's part
    // runs alongside the nurse's.
    doctor_attends(p.arrival_time);
    co_await serve(*staff_nurse_, Tier::high, nurse_time, p, "staff_nurse");
  }

  const sim::Minutes requested = sim_->now();
  trace(p, "labour_bed", "queue");
  const auto bed = co_await labour_beds_->acquire_within(Tier::high, c.referral_threshold);
  const double waited = sim_->now() - requested;
  if (!bed) {
    audit_.min_referred_labour_wait = std::min(audit_.min_referred_labour_wait, waited);
    if (steady_) ++referred_;
    discharge(p, Disposition::referred_out);
    co_return;
  }
  audit_.max_admitted_labour_wait = std::max(audit_.max_admitted_labour_wait, waited);
  if (steady_) ++admitted_;
  trace(p, "labour_bed", "start");
  if (c.childbirth_order == ChildbirthOrder::bed_then_care) {
    doctor_attends(sim_->now());
    sim_->spawn(attend(*staff_nurse_, Tier::high, nurse_time, p, "staff_nurse"));
  }
  co_await sim_->delay(sim::sample(st.labour_bed, c.labour_bed_stay));
  labour_beds_->release(*bed);
  trace(p, "labour_bed", "end");

  ++audit_.bed_stays[static_cast<int>(p.patient_class)];
  co_await serve(*inpatient_beds_, Tier::high, sim::sample(st.postdelivery_bed, c.postdelivery_bed_stay), p,
                 "inpatient_bed");
  discharge(p, Disposition::completed);
}

sim::Process Facility::anc_visit(PatientRecord p) {
  const auto& c = config_;
  auto& st = *streams_;
  p.arrival_time = sim_->now();
  admit(p);
  audit_.max_anc_visit_index = std::max(audit_.max_anc_visit_index, p.visit_index);
  // The next visit is booked on arrival.
  if (p.visit_index < c.anc_visits) {
    const auto gap = st.anc_gap.uniform_int(c.anc_gap_min_days, c.anc_gap_max_days);
    PatientRecord next = p;
    next.visit_index = p.visit_index + 1;
    sim_->schedule(p.arrival_time + static_cast<double>(gap) * minutes_per_day,
                   [this, next] { sim_->spawn(anc_visit(next)); });
  }
  co_await serve(*staff_nurse_, Tier::low, sim::sample(st.anc_nurse, c.anc_nurse), p, "staff_nurse");
  co_await serve(*lab_, Tier::low, sim::sample(st.lab, c.lab_service), p, "lab");
  ++audit_.pharmacy_visits[static_cast<int>(p.patient_class)];
  co_await serve(*pharmacy_, Tier::low, sim::sample(st.pharmacy, c.pharmacy_service), p, "pharmacy");
  discharge(p, Disposition::completed);
}

// --- replications ---------------------------------------------------------

ReplicationOutcome run_replication(const PhcConfiguration& config, const sim::RunPlan& plan,
                                   std::vector<TraceRecord>* trace) {
  Facility facility(config, plan.seed, trace);
  return sim::run(facility, plan);
}

OutcomeReport simulate(const PhcConfiguration& config, std::size_t n_replications, double horizon_days,
                       double warmup_days, std::uint64_t base_seed, unsigned threads) {
  if (n_replications < 1) throw std::invalid_argument("simulate needs at least one replication");
  config.validate();
  sim::RunPlan{horizon_days, warmup_days, base_seed}.validate();
  auto reps = sim::replicate(
      n_replications,
      [&](std::size_t r) {
        return run_replication(config,
                               sim::RunPlan{horizon_days, warmup_days, sim::replication_seed(base_seed, r)});
      },
      threads);
  return aggregate(std::move(reps), config.childbirth_enabled());
}

}  // namespace phc::model
