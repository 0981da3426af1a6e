#include "doctest.h"

#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "surfint/sparse.hpp"

using namespace surfint;

TEST_CASE("triplets are merged in order") {
  const auto A = CsrMatrix::from_triplets(3, 3, {{2, 1, 1.0}, {0, 0, 2.0}, {2, 1, 0.5}, {1, 2, -1.0}});
  CHECK(A.nnz() == 3);
  CHECK(A.at(2, 1) == 1.5);
  CHECK(A.at(0, 0) == 2.0);
  CHECK(A.at(1, 1) == 0.0);
  CHECK_THROWS_AS(CsrMatrix::from_triplets(2, 2, {{2, 0, 1.0}}), SizeError);
}

TEST_CASE("matrix sum keeps the union pattern") {
  const auto A = CsrMatrix::from_triplets(2, 2, {{0, 0, 1.0}, {1, 1, 2.0}});
  const auto B = CsrMatrix::from_triplets(2, 2, {{0, 1, 3.0}, {1, 1, 2.0}});
  const auto C = add(A, 1.0, B, -1.0);
  CHECK(C.nnz() == 3);
  CHECK(C.at(1, 1) == 0.0);
  CHECK(C.at(0, 1) == -3.0);
}

TEST_CASE("parallel and serial products agree") {
  const auto p = fixture::make(make_circle(1.0, {0, 0}, 3.0, 32), 0.2, MaterialData::constant(make_circle(1.0, {0, 0}, 3.0, 32), 2.0, 1.0));
  std::mt19937_64 rng(1);
  const auto x = fixture::random_vector(p.F.K_cont.rows, rng);
  std::vector<double> y1(x.size()), y2(x.size());
  p.F.K_cont.multiply(x, y1);
  p.F.K_cont.multiply_serial(x, y2);
  CHECK(y1 == y2);
  CHECK(dot(x, y1) == doctest::Approx(dot_serial(x, y2)).epsilon(1e-13));
}

TEST_CASE("MatrixMarket round trip") {
  const auto g = make_broken_line(0.7, 3.0);
  const auto p = fixture::make(g, 0.5, MaterialData::constant(g, 1.0, 1.0));
  const auto A = p.F.A_deltaprime();
  std::stringstream ss;
  write_matrix_market(ss, A);
  const auto B = read_matrix_market(ss);
  REQUIRE(B.nnz() == A.nnz());
  CHECK(B.col == A.col);
  CHECK(B.val == A.val);
  std::stringstream bad("not a matrix\n");
  CHECK_THROWS_AS(read_matrix_market(bad), DomainError);
}
