#include "kshell/continuation.hpp"

#include <chrono>
#include <cmath>

namespace kshell {

ArcLengthVariant arc_length_variant_from_string(const std::string& tag) {
  if (tag == "linearized") return ArcLengthVariant::linearized;
  if (tag == "cylindrical") return ArcLengthVariant::cylindrical;
  if (tag == "modified_riks") return ArcLengthVariant::modified_riks;
  throw SchemaError("unknown arc-length variant '" + tag + "'");
}

double adapt_arc_length(double dl_prev, int iterations_used, int desired_iterations, double dl_min,
                        double dl_max) {
  const double dl =
      dl_prev * std::sqrt(static_cast<double>(desired_iterations) /
                          static_cast<double>(std::max(1, iterations_used)));
  return std::clamp(dl, dl_min, dl_max);
}

namespace {

struct Clock {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

}  // namespace

ContinuationResult trace_path(ContinuationSystem& system, const ContinuationSettings& settings,
                              const IncrementCallback& on_increment) {
  ContinuationResult result;
  const VecX Q_f = system.reference_load();
  const double q_norm = Q_f.norm();
  if (q_norm == 0.0) throw SolverError("reference load vector is zero");

  TangentFactorization fact;

  // displacement scale from the linear solution
  fact.factorize(system.tangent());
  const VecX q_lin = fact.solve(Q_f);
  const double scale = std::max(q_lin.cwiseAbs().maxCoeff(), 1e-300);

  double lambda = 0.0;
  VecX dq_prev;       // last converged increment (for the predictor sign)
  double dlam_prev = 0.0;
  bool have_prev = false;

  // first arc length reproduces the requested initial load-factor step
  const VecX qt0_scaled = q_lin / scale;
  double dl = (settings.initial_arc_length > 0.0)
                  ? settings.initial_arc_length
                  : std::abs(settings.initial_lpf_step) *
                        std::sqrt(qt0_scaled.squaredNorm() + 1.0);
  const double dl_min = dl * settings.min_arc_length_factor;
  const double dl_max = dl * settings.max_arc_length_factor;

  for (int inc = 1; inc <= settings.max_increments; ++inc) {
    bool converged = false;
    int used_iterations = 0;
    int inertia = 0;
    Clock clock;

    for (int cut = 0; cut <= settings.max_cuts && !converged; ++cut) {
      bool failed = false;
      bool disp_ok = false;
      converged = false;
      try {
        // predictor
        fact.factorize(system.tangent());
        inertia = fact.inertia();
        VecX q_T = fact.solve(Q_f);
        VecX qt_s = q_T / scale;
        const VecX qt0 = qt_s;  // predictor tangential displacement (scaled)
        double dlam0 = dl / std::sqrt(qt_s.squaredNorm() + 1.0);
        double sign = (settings.initial_lpf_step >= 0.0) ? 1.0 : -1.0;
        if (have_prev) {
          const double proj = qt0.dot(dq_prev / scale) + dlam_prev;
          sign = (proj >= 0.0) ? 1.0 : -1.0;
        }
        dlam0 *= sign;

        VecX dq = dlam0 * q_T;
        double dlam = dlam0;
        system.apply_increment(dq);

        for (int it = 1; it <= settings.max_iterations; ++it) {
          used_iterations = it;
          const VecX F = system.internal_forces();
          const double lam_cur = lambda + dlam;
          const VecX psi = lam_cur * Q_f - F;
          const double ref = std::max(std::abs(lam_cur), 1e-3) * q_norm;
          const bool force_ok = psi.norm() <= settings.force_tolerance * ref;
          if (force_ok && (disp_ok || dq.norm() == 0.0)) {
            converged = true;
            break;
          }
          fact.factorize(system.tangent());
          inertia = fact.inertia();
          q_T = fact.solve(Q_f);
          const VecX dq_r = fact.solve(psi);
          qt_s = q_T / scale;
          const VecX dqr_s = dq_r / scale;

          double dlam_it = 0.0;
          switch (settings.variant) {
            case ArcLengthVariant::linearized:
              dlam_it = -dqr_s.dot(qt0) / (qt_s.dot(qt0) + 1.0);
              break;
            case ArcLengthVariant::modified_riks: {
              const VecX dq_s = dq / scale;
              dlam_it = -dqr_s.dot(dq_s) / (qt_s.dot(dq_s) + dlam);
              break;
            }
            case ArcLengthVariant::cylindrical: {
              const VecX base = (dq + dq_r) / scale;
              const double a = qt_s.squaredNorm();
              const double b = 2.0 * qt_s.dot(base);
              const double cc = base.squaredNorm() - dl * dl;
              const double disc = b * b - 4.0 * a * cc;
              if (disc < 0.0) {
                failed = true;
              } else {
                const double r1 = (-b + std::sqrt(disc)) / (2.0 * a);
                const double r2 = (-b - std::sqrt(disc)) / (2.0 * a);
                const VecX dir = dq / scale;
                const double c1 = (base + r1 * qt_s).dot(dir);
                const double c2 = (base + r2 * qt_s).dot(dir);
                dlam_it = (c1 >= c2) ? r1 : r2;
              }
              break;
            }
          }
          if (failed) break;

          const VecX step = dq_r + dlam_it * q_T;
          system.apply_increment(step);
          dq += step;
          dlam += dlam_it;
          disp_ok = step.norm() <= settings.displacement_tolerance * std::max(dq.norm(), 1e-300);
          if (it == settings.max_iterations) failed = true;
        }

        if (converged) {
          lambda += dlam;
          dq_prev = dq;
          dlam_prev = dlam;
          have_prev = true;
          system.save_checkpoint();
        }
      } catch (const SingularMatrixError&) {
        failed = true;
      } catch (const SelfPenetrationError&) {
        // a trial state folded past the shifter limit: cut and retry
        failed = true;
      } catch (const DegenerateSurfaceError&) {
        failed = true;
      }

      if (!converged) {
        system.restore_checkpoint();
        dl *= 0.5;
        if (dl < dl_min) {
          result.termination = "arc length cut below minimum";
          return result;
        }
      }
    }

    if (!converged) {
      result.termination = "increment failed after maximum cuts";
      return result;
    }

    IncrementRecord rec;
    rec.increment = inc;
    rec.lambda = lambda;
    rec.iterations = used_iterations;
    rec.arc_length = dl;
    rec.inertia = inertia;
    rec.seconds = clock.seconds();
    result.records.push_back(rec);
    if (on_increment) on_increment(rec, system);

    if (settings.stop_at_target && lambda >= settings.lambda_target) {
      // trim the overshoot back to the target with a load-controlled solve
      if (lambda > settings.lambda_target * (1.0 + 1e-12)) {
        const NewtonResult nr = newton_raphson(
            system, lambda, settings.lambda_target,
            {settings.max_iterations, settings.force_tolerance, settings.displacement_tolerance});
        if (!nr.converged) {
          system.restore_checkpoint();
        } else {
          lambda = settings.lambda_target;
          system.save_checkpoint();
          IncrementRecord trim;
          trim.increment = inc + 1;
          trim.lambda = lambda;
          trim.iterations = nr.iterations;
          trim.arc_length = 0.0;
          trim.inertia = nr.inertia;
          trim.seconds = 0.0;
          result.records.push_back(trim);
          if (on_increment) on_increment(trim, system);
        }
      }
      result.reached_target = true;
      result.termination = "reached target load factor";
      return result;
    }

    dl = adapt_arc_length(dl, used_iterations, settings.desired_iterations, dl_min, dl_max);
  }
  result.termination = "maximum increments reached";
  return result;
}

NewtonResult newton_raphson(ContinuationSystem& system, double lambda_from, double lambda_target,
                            const NewtonSettings& settings) {
  NewtonResult out;
  const VecX Q_f = system.reference_load();
  const double ref = std::max(std::abs(lambda_target), 1e-3) * Q_f.norm();
  TangentFactorization fact;
  VecX dq_total = VecX::Zero(system.size());
  (void)lambda_from;
  for (int it = 1; it <= settings.max_iterations; ++it) {
    out.iterations = it;
    const VecX psi = lambda_target * Q_f - system.internal_forces();
    const bool force_ok = psi.norm() <= settings.force_tolerance * ref;
    if (force_ok && it > 1) {
      out.converged = true;
      return out;
    }
    fact.factorize(system.tangent());
    out.inertia = fact.inertia();
    const VecX dq = fact.solve(psi);
    system.apply_increment(dq);
    dq_total += dq;
    if (force_ok &&
        dq.norm() <= settings.displacement_tolerance * std::max(dq_total.norm(), 1e-300)) {
      out.converged = true;
      return out;
    }
    if (!std::isfinite(dq.norm())) break;
  }
  // leave the state where it ended; caller decides whether to roll back
  out.converged = false;
  return out;
}

}  // namespace kshell
