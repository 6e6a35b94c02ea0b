#pragma once

#include "uir/uir.hpp"

#include <sstream>
#include <string>

namespace fixtures
{

// Two systems, ten test cases, precision and recall; A >=∀ B on cases 1-6,
// B >=∀ A on cases 1, 2, 7, 8.
inline constexpr char const* ten_cases_csv = R"(test_case,system,metric,score
1,A,precision,0.5
1,A,recall,0.5
1,B,precision,0.5
1,B,recall,0.5
2,A,precision,0.5
2,A,recall,0.2
2,B,precision,0.5
2,B,recall,0.2
3,A,precision,0.5
3,A,recall,0.2
3,B,precision,0.4
3,B,recall,0.2
4,A,precision,0.6
4,A,recall,0.4
4,B,precision,0.6
4,B,recall,0.3
5,A,precision,0.7
5,A,recall,0.5
5,B,precision,0.6
5,B,recall,0.4
6,A,precision,0.3
6,A,recall,0.5
6,B,precision,0.1
6,B,recall,0.4
7,A,precision,0.4
7,A,recall,0.5
7,B,precision,0.5
7,B,recall,0.6
8,A,precision,0.4
8,A,recall,0.5
8,B,precision,0.6
8,B,recall,0.6
9,A,precision,0.3
9,A,recall,0.5
9,B,precision,0.1
9,B,recall,0.6
10,A,precision,0.2
10,A,recall,0.5
10,B,precision,0.4
10,B,recall,0.3
)";

inline uir::ScoreTable ten_cases()
{
    std::istringstream in(ten_cases_csv);
    return uir::parse_score_table(in, "ten_cases");
}

inline uir::MetricVector pr(double p, double r)
{
    return uir::MetricVector(std::vector<std::string>{"precision", "recall"}, {p, r});
}

inline uir::Clustering clustering(uir::Clustering::Map m) { return uir::Clustering(std::move(m)); }
inline uir::GoldStandard gold(uir::GoldStandard::Map m) { return uir::GoldStandard(std::move(m)); }

} // namespace fixtures
