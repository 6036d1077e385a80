#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "phc/model/config.hpp"
#include "phc/model/outcome.hpp"
#include "phc/model/patient.hpp"
#include "phc/sim/process.hpp"
#include "phc/sim/random.hpp"
#include "phc/sim/replication.hpp"
#include "phc/sim/resource.hpp"

namespace phc::model {

/// One replication of a PHC: resources, arrival generators, pathways and the
/// administrative rosters. Satisfies sim::SteadyStateModel.
class Facility {
 public:
  Facility(PhcConfiguration config, std::uint64_t seed, std::vector<TraceRecord>* trace = nullptr);
  ~Facility();
  Facility(const Facility&) = delete;
  Facility& operator=(const Facility&) = delete;

  void start(sim::Simulation& sim);
  void reset_statistics(sim::Simulation& sim);
  ReplicationOutcome collect(sim::Simulation& sim);

  [[nodiscard]] const PhcConfiguration& config() const noexcept { return config_; }

 private:
  struct Streams;

  sim::Process opd_arrivals();
  sim::Process ipd_arrivals();
  sim::Process childbirth_arrivals();
  sim::Process anc_arrivals();
  sim::Process daily_admin();
  sim::Process nurse_shift_admin();

  sim::Process outpatient_visit(PatientRecord p, int planned_visits);
  sim::Process inpatient_pathway(PatientRecord p);
  sim::Process childbirth_pathway(PatientRecord p);
  sim::Process anc_visit(PatientRecord p);
  sim::Process attend(sim::PriorityResource& r, sim::Tier tier, sim::Minutes duration, PatientRecord p,
                      std::string_view name);

  /// Seizes r, holds it for the sampled duration (scaled), releases.
  sim::Task serve(sim::PriorityResource& r, sim::Tier tier, sim::Minutes duration, PatientRecord& p,
                  std::string_view name);

  void schedule_followup(const PatientRecord& p, int planned_visits);
  void admit(PatientRecord& p);
  void discharge(PatientRecord& p, Disposition d);
  void trace(const PatientRecord& p, std::string_view resource, std::string_view event);
  [[nodiscard]] bool steady() const noexcept { return steady_; }
  [[nodiscard]] double childbirth_doctor_scale();

  PhcConfiguration config_;
  std::unique_ptr<Streams> streams_;
  std::vector<TraceRecord>* trace_;
  sim::Simulation* sim_ = nullptr;

  std::unique_ptr<sim::PriorityResource> doctor_;
  std::unique_ptr<sim::PriorityResource> ncd_nurse_;
  std::unique_ptr<sim::PriorityResource> staff_nurse_;
  std::unique_ptr<sim::PriorityResource> pharmacy_;
  std::unique_ptr<sim::PriorityResource> lab_;
  std::unique_ptr<sim::PriorityResource> inpatient_beds_;
  std::unique_ptr<sim::PriorityResource> labour_beds_;

  std::uint64_t next_patient_id_ = 1;
  bool steady_ = false;
  std::uint64_t opd_visits_ = 0;
  std::uint64_t childbirth_arrivals_ = 0;
  std::uint64_t admitted_ = 0;
  std::uint64_t referred_ = 0;
  FlowAudit audit_;
};

/// One replication under `plan` (plan.seed seeds every stream).
ReplicationOutcome run_replication(const PhcConfiguration& config, const sim::RunPlan& plan,
                                   std::vector<TraceRecord>* trace = nullptr);

/// Independent replications seeded from (base_seed, r), aggregated.
OutcomeReport simulate(const PhcConfiguration& config, std::size_t n_replications, double horizon_days,
                       double warmup_days, std::uint64_t base_seed, unsigned threads = 0);

}  // namespace phc::model
