#include "catch_amalgamated.hpp"

#include "tdelay/errors.hpp"
#include "tdelay/montecarlo.hpp"

using namespace tdelay;

TEST_CASE("observable names round trip") {
  for (Observable o : {Observable::wigner, Observable::proper, Observable::partial, Observable::partial_matrix,
                       Observable::heuristic})
    CHECK(observable_from_string(to_string(o)) == o);
  CHECK_THROWS_AS(observable_from_string("lifetime"), DomainError);
  CHECK(values_per_draw(Observable::proper, 3) == 3);
  CHECK(values_per_draw(Observable::wigner, 3) == 1);
}

TEST_CASE("serial and parallel drivers agree exactly") {
  for (Observable o : {Observable::wigner, Observable::proper, Observable::partial, Observable::partial_matrix,
                       Observable::heuristic})
    for (int beta : {1, 2}) {
      SampleRequest req;
      req.observable = o;
      req.beta = beta;
      req.channels = 3;
      req.coupling = CouplingSpec::from_transmission(0.4);
      req.samples = 1000;
      req.batch_size = 97;
      req.seed = 11;
      const SampleResult ref = run_serial(req);
      CHECK(ref.draws == 1000);
      CHECK(ref.batches == 11);
      CHECK(ref.batch.values.size() == 1000u * values_per_draw(o, 3));
      CHECK(ref.histogram.total() == ref.batch.values.size());
      for (int w : {1, 2, 4}) {
        const SampleResult par = run_parallel(req, w);
        CHECK(par.batch.values == ref.batch.values);
        CHECK(par.histogram == ref.histogram);
      }
    }
}

TEST_CASE("seeds select independent streams") {
  SampleRequest req;
  req.channels = 2;
  req.samples = 50;
  req.seed = 1;
  const auto a = run_serial(req).batch.values;
  req.seed = 2;
  CHECK(run_serial(req).batch.values != a);
  req.seed = 1;
  CHECK(run_serial(req).batch.values == a);
}

TEST_CASE("histogram scale leaves stored values untouched") {
  SampleRequest req;
  req.channels = 2;
  req.samples = 200;
  req.seed = 5;
  const SampleResult plain = run_serial(req);
  req.histogram_scale = 10.0;
  const SampleResult scaled = run_serial(req);
  CHECK(plain.batch.values == scaled.batch.values);
  auto manual = EmpiricalDistribution::from_spec(req.bins);
  for (double v : plain.batch.values) manual.add(10.0 * v);
  CHECK(manual == scaled.histogram);
}

TEST_CASE("request validation") {
  SampleRequest req;
  req.samples = 10;
  req.beta = 4;
  req.observable = Observable::wigner;
  CHECK_THROWS_AS(run_serial(req), UnsupportedSymmetry);
  CHECK_THROWS_AS(run_parallel(req, 2), UnsupportedSymmetry);
  req.observable = Observable::partial;
  CHECK(run_serial(req).batch.values.size() == 10);
  req.observable = Observable::heuristic;
  CHECK(run_serial(req).batch.values.size() == 10);
  req.beta = 3;
  CHECK_THROWS_AS(run_serial(req), DomainError);
  req.beta = 2;
  req.samples = 0;
  CHECK_THROWS_AS(run_serial(req), DomainError);
  req.samples = 10;
  req.histogram_scale = 0;
  CHECK_THROWS_AS(run_serial(req), DomainError);
}
