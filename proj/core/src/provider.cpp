#include "coolsim/provider.hpp"

#include <algorithm>
#include <stdexcept>

namespace coolsim {

void ProviderBehavior::validate() const {
  if (honest && any_attack()) throw std::invalid_argument("honest provider cannot carry attacks");
  if (delay_attack && content_attack) {
    throw std::invalid_argument("delay and content attacks are mutually exclusive");
  }
  if (delta_att_ms < 0.0) throw std::invalid_argument("delta_att must be >= 0");
  if (clock_error_sigma_ms < 0.0) throw std::invalid_argument("clock error sigma must be >= 0");
}

Provider::Provider(ProviderId id, ProviderBehavior behavior, double service_time_ms,
                   RngStream clock_rng)
    : id_(id), behavior_(behavior), service_time_(service_time_ms), clock_rng_(std::move(clock_rng)) {
  behavior_.validate();
  if (!(service_time_ > 0.0)) throw std::invalid_argument("service time must be > 0");
}

bool Provider::enqueue(RequestId request, SimTime now) {
  if (behavior_.queue_attack) {
    external_queue_.push_back(request);
    refill_tee(now);
  } else {
    tee_queue_.push_back(Queued{request, now});
  }
  return !in_service_ && !tee_queue_.empty();
}

void Provider::refill_tee(SimTime now) {
  if (tee_queue_.empty() && !external_queue_.empty()) {
    tee_queue_.push_back(Queued{external_queue_.front(), now});
    external_queue_.pop_front();
  }
}

std::optional<ServiceStart> Provider::start_service(SimTime now) {
  if (in_service_ || tee_queue_.empty()) return std::nullopt;
  const Queued& head = tee_queue_.front();
  in_service_ = ServiceStart{head.request, head.t_tee_enter, now, now + service_time_};
  busy_until_ = in_service_->t_end;
  return in_service_;
}

SearchResponse Provider::complete_service(RequestId request, bool requester_honest, SimTime now) {
  if (!in_service_ || in_service_->request != request) {
    throw std::logic_error("complete_service for a request that is not in service");
  }
  const ServiceStart& s = *in_service_;
  const double true_wait = s.t_serv - s.t_tee_enter;

  SearchResponse rsp;
  rsp.request_id = request;
  rsp.asset_horizon = s.t_serv;
  rsp.t_depart = now;

  if (behavior_.trusted_time) {
    double reported = true_wait;
    if (behavior_.clock_error_sigma_ms > 0.0) {
      reported += behavior_.clock_error_sigma_ms * clock_rng_.normal();
    }
    rsp.reported_queue_wait = std::max(0.0, reported);
  } else if (!behavior_.honest && requester_honest && behavior_.delay_attack &&
             behavior_.fabrication == NoTtFabrication::kAddDelay) {
    rsp.reported_queue_wait = true_wait + behavior_.delta_att_ms;
    rsp.flags |= kFlagFabricatedWait;
  } else {
    rsp.reported_queue_wait = true_wait;
  }
  if (behavior_.queue_attack) rsp.flags |= kFlagExternalQueue;
  return rsp;
}

SearchResponse Provider::apply_egress_policy(SearchResponse rsp, bool requester_honest,
                                             SimTime now) const {
  rsp.t_depart = now;
  if (behavior_.honest || !requester_honest) return rsp;
  if (behavior_.delay_attack) {
    rsp.t_depart = now + behavior_.delta_att_ms;
    rsp.flags |= kFlagDelayed;
  } else if (behavior_.content_attack) {
    rsp.asset_horizon = 0.0;
    rsp.flags |= kFlagContent;
  }
  return rsp;
}

bool Provider::finish_service(SimTime now) {
  if (!in_service_) throw std::logic_error("finish_service while idle");
  tee_queue_.pop_front();
  in_service_.reset();
  ++served_;
  refill_tee(now);
  return !tee_queue_.empty();
}

std::size_t Provider::report_queue_length() const {
  if (behavior_.queue_attack) return std::min<std::size_t>(tee_queue_.size(), 1);
  return tee_queue_.size();
}

void Provider::on_asset_indexed(AssetId asset, SimTime /*t_index*/) {
  indexed_ = std::max<std::size_t>(indexed_, asset + 1);
}

}  // namespace coolsim
