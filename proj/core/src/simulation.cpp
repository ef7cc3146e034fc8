#include "crosstune/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "crosstune/log.hpp"
#include "crosstune/rng.hpp"

namespace crosstune {

namespace {

constexpr std::uint64_t kMeansTag = 0x6d65616e73ULL;
constexpr std::uint64_t kEventTagBase = 1000;
constexpr std::uint64_t kFacesPhase = 0xfa5e01ULL;
constexpr std::uint64_t kDevicesPhase = 0xde71ce02ULL;
constexpr std::uint64_t kNonPoiPhase = 0x0b5e7e03ULL;

Vec random_unit_vector(Rng& rng, int dim) {
  Vec v(dim);
  double norm = 0.0;
  do {
    for (int i = 0; i < dim; ++i) v[i] = rng.gaussian();
    norm = v.norm();
  } while (norm <= 0.0);
  return v / norm;
}

// Means with pairwise angle >= separation, by rejection.
std::vector<Vec> draw_means(Rng& rng, int count, int dim, double separation,
                            const std::vector<Vec>& existing) {
  const double max_dot = std::cos(separation);
  std::vector<Vec> means = existing;
  const int retries_per_mean = 2000;
  for (int j = static_cast<int>(existing.size()); j < count + static_cast<int>(existing.size()); ++j) {
    bool placed = false;
    for (int attempt = 0; attempt < retries_per_mean && !placed; ++attempt) {
      Vec candidate = random_unit_vector(rng, dim);
      bool ok = true;
      for (const Vec& other : means) {
        if (candidate.dot(other) > max_dot) {
          ok = false;
          break;
        }
      }
      if (ok) {
        means.push_back(std::move(candidate));
        placed = true;
      }
    }
    if (!placed)
      throw std::runtime_error(
          "synth_dataset: cannot place identity means with separation " +
          std::to_string(separation) + " in dimension " + std::to_string(dim));
  }
  means.erase(means.begin(), means.begin() + static_cast<std::ptrdiff_t>(existing.size()));
  return means;
}

std::string mac_for_index(int index) {
  char buf[18];
  std::snprintf(buf, sizeof(buf), "02:00:00:00:%02x:%02x", (index >> 8) & 0xff,
                index & 0xff);
  return std::string(buf);
}

std::string name_for_index(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "subject_%02d", index);
  return std::string(buf);
}

Vec noisy_sample(Rng& rng, const Vec& mean, double spread) {
  Vec v = mean;
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] += spread * rng.gaussian();
  const double norm = v.norm();
  if (norm <= 0.0) return mean;
  return v / norm;
}

// Rebuilds the dataset keeping only samples where keep[row] is true.
void remove_sample_rows(SimOutput& sim, const std::vector<bool>& keep) {
  Dataset& ds = sim.dataset;
  const int n = ds.num_samples();
  std::vector<int> new_row(static_cast<std::size_t>(n), -1);
  int kept = 0;
  for (int i = 0; i < n; ++i)
    if (keep[static_cast<std::size_t>(i)]) new_row[static_cast<std::size_t>(i)] = kept++;

  Mat features(kept, ds.features.cols());
  std::vector<FaceSample> samples;
  samples.reserve(static_cast<std::size_t>(kept));
  for (int i = 0; i < n; ++i) {
    if (new_row[static_cast<std::size_t>(i)] < 0) continue;
    features.row(new_row[static_cast<std::size_t>(i)]) = ds.features.row(i);
    samples.push_back(ds.samples[static_cast<std::size_t>(i)]);
  }
  ds.features = std::move(features);
  ds.samples = std::move(samples);
  for (Event& e : ds.events) {
    std::vector<int> rows;
    rows.reserve(e.sample_rows.size());
    for (int r : e.sample_rows)
      if (new_row[static_cast<std::size_t>(r)] >= 0)
        rows.push_back(new_row[static_cast<std::size_t>(r)]);
    e.sample_rows = std::move(rows);
  }
}

// Drops events that lost both modalities (can happen when both injections
// hit every attendee of an event).
void drop_empty_events(SimOutput& sim) {
  Dataset& ds = sim.dataset;
  std::vector<int> new_id(ds.events.size(), -1);
  int kept = 0;
  for (std::size_t k = 0; k < ds.events.size(); ++k) {
    const Event& e = ds.events[k];
    const bool has_mac = e.attendance.size() > 0 && e.attendance.maxCoeff() > 0.0;
    if (!e.sample_rows.empty() || has_mac) new_id[k] = kept++;
  }
  if (kept == static_cast<int>(ds.events.size())) return;

  std::vector<Event> events;
  std::vector<AttendanceVector> clean;
  NoiseAnnotations ann = NoiseAnnotations::empty(kept);
  events.reserve(static_cast<std::size_t>(kept));
  for (std::size_t k = 0; k < ds.events.size(); ++k) {
    if (new_id[k] < 0) continue;
    Event e = ds.events[k];
    e.event_id = new_id[k];
    for (int r : e.sample_rows) ds.samples[static_cast<std::size_t>(r)].event_id = e.event_id;
    events.push_back(std::move(e));
    clean.push_back(sim.clean_attendance[k]);
    ann.false_alarm_faces[static_cast<std::size_t>(new_id[k])] = sim.annotations.false_alarm_faces[k];
    ann.false_alarm_devices[static_cast<std::size_t>(new_id[k])] = sim.annotations.false_alarm_devices[k];
    ann.nonpoi_samples[static_cast<std::size_t>(new_id[k])] = sim.annotations.nonpoi_samples[k];
  }
  ds.events = std::move(events);
  sim.clean_attendance = std::move(clean);
  sim.annotations = std::move(ann);
}

}  // namespace

void SimConfig::validate() const {
  if (m_poi < 2) throw std::invalid_argument("sim.m_poi must be >= 2");
  if (n_nonpoi < 0) throw std::invalid_argument("sim.n_nonpoi must be >= 0");
  if (dim < 2) throw std::invalid_argument("sim.dim must be >= 2");
  if (events < 1) throw std::invalid_argument("sim.events must be >= 1");
  if (!(attend_prob >= 0.0 && attend_prob <= 1.0))
    throw std::invalid_argument("sim.attend_prob must be in [0,1]");
  if (images_min < 1 || images_max < images_min)
    throw std::invalid_argument("sim.images_per_attendance must be a range of integers >= 1");
  if (cluster_spread < 0.0)
    throw std::invalid_argument("sim.cluster_spread must be >= 0");
  if (!(separation >= 0.0 && separation < 3.141592653589793))
    throw std::invalid_argument("sim.separation must be in [0, pi)");
  if (!(nonpoi_presence_prob >= 0.0 && nonpoi_presence_prob <= 1.0))
    throw std::invalid_argument("sim.nonpoi_presence_prob must be in [0,1]");
  if (!(false_alarm_face_rate >= 0.0 && false_alarm_face_rate <= 1.0))
    throw std::invalid_argument("sim.false_alarm_face_rate must be in [0,1]");
  if (!(false_alarm_device_rate >= 0.0 && false_alarm_device_rate <= 1.0))
    throw std::invalid_argument("sim.false_alarm_device_rate must be in [0,1]");
  if (slot_hours < 1 || 24 % slot_hours != 0)
    throw std::invalid_argument("sim.slot_hours must divide 24");
}

NoiseAnnotations NoiseAnnotations::empty(int h) {
  NoiseAnnotations ann;
  ann.false_alarm_faces.assign(static_cast<std::size_t>(h), {});
  ann.false_alarm_devices.assign(static_cast<std::size_t>(h), {});
  ann.nonpoi_samples.assign(static_cast<std::size_t>(h), 0);
  return ann;
}

SimOutput synth_dataset(const SimConfig& cfg) {
  cfg.validate();

  SimOutput out;
  out.slot_hours = cfg.slot_hours;
  Dataset& ds = out.dataset;
  ds.dim = cfg.dim;

  Rng means_rng(Rng::derive(cfg.seed, kMeansTag));
  const std::vector<Vec> means = draw_means(means_rng, cfg.m_poi, cfg.dim,
                                            cfg.separation, {});

  ds.identities.reserve(static_cast<std::size_t>(cfg.m_poi));
  for (int j = 0; j < cfg.m_poi; ++j)
    ds.identities.push_back(Identity{j, name_for_index(j), mac_for_index(j)});

  const int slots_per_day = 24 / cfg.slot_hours;
  std::vector<Vec> features;
  std::int64_t next_sample_id = 0;

  for (int k = 0; k < cfg.events; ++k) {
    Rng rng(Rng::derive(cfg.seed, kEventTagBase + static_cast<std::uint64_t>(k)));
    std::vector<std::pair<int, int>> attendees;  // (identity, image count)
    for (int j = 0; j < cfg.m_poi; ++j) {
      if (!rng.bernoulli(cfg.attend_prob)) continue;
      const int count = static_cast<int>(
          rng.uniform_int(static_cast<long long>(cfg.images_min),
                          static_cast<long long>(cfg.images_max)));
      attendees.emplace_back(j, count);
    }
    if (attendees.empty()) continue;

    Event ev;
    ev.event_id = ds.num_events();
    ev.day = k / slots_per_day;
    ev.slot_index = k % slots_per_day;
    ev.location = "site_a";
    ev.attendance = Vec::Zero(cfg.m_poi);
    for (const auto& [j, count] : attendees) {
      ev.attendance[j] = 1.0;
      for (int c = 0; c < count; ++c) {
        FaceSample s;
        s.sample_id = next_sample_id++;
        s.event_id = ev.event_id;
        s.truth = j;
        ev.sample_rows.push_back(static_cast<int>(features.size()));
        features.push_back(noisy_sample(rng, means[static_cast<std::size_t>(j)],
                                        cfg.cluster_spread));
        ds.samples.push_back(std::move(s));
      }
    }
    out.clean_attendance.push_back(ev.attendance);
    ds.events.push_back(std::move(ev));
  }

  if (ds.events.empty())
    throw std::runtime_error("synth_dataset: no event had any attendee");

  ds.features.resize(static_cast<Eigen::Index>(features.size()), cfg.dim);
  for (std::size_t i = 0; i < features.size(); ++i)
    ds.features.row(static_cast<Eigen::Index>(i)) = features[i].transpose();

  out.annotations = NoiseAnnotations::empty(ds.num_events());
  return out;
}

void inject_false_alarm_faces(SimOutput& sim, double rate, std::uint64_t seed) {
  if (!(rate >= 0.0 && rate <= 1.0))
    throw std::invalid_argument("inject_false_alarm_faces: rate must be in [0,1]");
  if (rate == 0.0) return;
  Dataset& ds = sim.dataset;
  for (std::size_t k = 0; k < ds.events.size(); ++k) {
    Rng rng(Rng::derive(seed, static_cast<std::uint64_t>(k)));
    Event& e = ds.events[k];
    for (Eigen::Index j = 0; j < e.attendance.size(); ++j) {
      if (e.attendance[j] <= 0.0) continue;
      if (rng.bernoulli(rate)) {
        e.attendance[j] = 0.0;
        sim.annotations.false_alarm_faces[k].push_back(static_cast<int>(j));
      }
    }
  }
}

void inject_false_alarm_devices(SimOutput& sim, double rate, std::uint64_t seed) {
  if (!(rate >= 0.0 && rate <= 1.0))
    throw std::invalid_argument("inject_false_alarm_devices: rate must be in [0,1]");
  if (rate == 0.0) return;
  Dataset& ds = sim.dataset;
  std::vector<bool> keep(static_cast<std::size_t>(ds.num_samples()), true);
  for (std::size_t k = 0; k < ds.events.size(); ++k) {
    Rng rng(Rng::derive(seed, static_cast<std::uint64_t>(k)));
    const AttendanceVector& truth = sim.clean_attendance[k];
    for (Eigen::Index j = 0; j < truth.size(); ++j) {
      if (truth[j] <= 0.0) continue;
      if (!rng.bernoulli(rate)) continue;
      sim.annotations.false_alarm_devices[k].push_back(static_cast<int>(j));
      for (int r : ds.events[k].sample_rows) {
        const FaceSample& s = ds.samples[static_cast<std::size_t>(r)];
        if (s.truth && *s.truth == static_cast<int>(j)) keep[static_cast<std::size_t>(r)] = false;
      }
    }
  }
  remove_sample_rows(sim, keep);
}

void inject_nonpoi(SimOutput& sim, int count, double presence_prob,
                   std::uint64_t seed, const SimConfig& cfg) {
  if (count < 0) throw std::invalid_argument("inject_nonpoi: count must be >= 0");
  if (!(presence_prob >= 0.0 && presence_prob <= 1.0))
    throw std::invalid_argument("inject_nonpoi: presence_prob must be in [0,1]");
  if (count == 0) return;

  Dataset& ds = sim.dataset;

  // Unregistered subjects get their own means, kept separable from the POI.
  Rng means_rng(Rng::derive(seed, kMeansTag));
  std::vector<Vec> existing;
  {
    // POI means are not stored; approximate the separation constraint using
    // per-identity sample means, which is what matters for the disturbance.
    Mat acc = Mat::Zero(ds.num_identities(), ds.dim);
    Vec cnt = Vec::Zero(ds.num_identities());
    for (int i = 0; i < ds.num_samples(); ++i) {
      const auto t = ds.samples[static_cast<std::size_t>(i)].truth;
      if (t && *t >= 0) {
        acc.row(*t) += ds.features.row(i);
        cnt[*t] += 1.0;
      }
    }
    for (int j = 0; j < ds.num_identities(); ++j) {
      if (cnt[j] > 0.0) {
        Vec mean = (acc.row(j) / cnt[j]).transpose();
        const double norm = mean.norm();
        if (norm > 0.0) existing.push_back(mean / norm);
      }
    }
  }
  const std::vector<Vec> means =
      draw_means(means_rng, count, ds.dim, cfg.separation, existing);

  std::int64_t next_sample_id = 0;
  for (const FaceSample& s : ds.samples)
    next_sample_id = std::max(next_sample_id, s.sample_id + 1);

  std::vector<Vec> new_features;
  for (std::size_t k = 0; k < ds.events.size(); ++k) {
    Rng rng(Rng::derive(seed, kEventTagBase + static_cast<std::uint64_t>(k)));
    Event& e = ds.events[k];
    for (int np = 0; np < count; ++np) {
      if (!rng.bernoulli(presence_prob)) continue;
      const int images = static_cast<int>(
          rng.uniform_int(static_cast<long long>(cfg.images_min),
                          static_cast<long long>(cfg.images_max)));
      for (int c = 0; c < images; ++c) {
        FaceSample s;
        s.sample_id = next_sample_id++;
        s.event_id = e.event_id;
        s.truth = kNonPoi;
        e.sample_rows.push_back(ds.num_samples());
        new_features.push_back(noisy_sample(rng, means[static_cast<std::size_t>(np)],
                                            cfg.cluster_spread));
        ds.samples.push_back(std::move(s));
        ++sim.annotations.nonpoi_samples[k];
      }
    }
  }

  const Eigen::Index old_n = ds.features.rows();
  Mat features(old_n + static_cast<Eigen::Index>(new_features.size()), ds.dim);
  features.topRows(old_n) = ds.features;
  for (std::size_t i = 0; i < new_features.size(); ++i)
    features.row(old_n + static_cast<Eigen::Index>(i)) = new_features[i].transpose();
  ds.features = std::move(features);
}

SimOutput simulate(const SimConfig& cfg) {
  cfg.validate();
  SimOutput sim = synth_dataset(cfg);
  inject_false_alarm_faces(sim, cfg.false_alarm_face_rate,
                           Rng::derive(cfg.seed, kFacesPhase));
  inject_false_alarm_devices(sim, cfg.false_alarm_device_rate,
                             Rng::derive(cfg.seed, kDevicesPhase));
  inject_nonpoi(sim, cfg.n_nonpoi, cfg.nonpoi_presence_prob,
                Rng::derive(cfg.seed, kNonPoiPhase), cfg);
  drop_empty_events(sim);
  CT_INFO("simulated dataset: %d identities, %d events, %d samples",
          sim.dataset.num_identities(), sim.dataset.num_events(),
          sim.dataset.num_samples());
  return sim;
}

}  // namespace crosstune
