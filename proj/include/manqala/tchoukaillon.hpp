#pragma once

#include <vector>

#include "manqala/fock_space.hpp"

namespace manqala {

/// Sowing pit `pit` (site 0 is the Ruma) drops one stone into each pit
/// towards the Ruma, the last one landing in the Ruma.
struct Sow {
  int pit = 0;
  int stones = 0;

  friend bool operator==(const Sow&, const Sow&) = default;
};

struct TchoukaillonPlan {
  bool winnable = false;
  std::vector<Sow> sows;
  Occupation final_board;
};

/// Legal only when pit d holds exactly d stones. Throws ArgumentError
/// otherwise.
Occupation sow(const Occupation& board, int pit);

/// The winning play, built constructively: at each step the legal sow
/// nearest the Ruma is taken (on a winnable board it is the only move that
/// does not lose). Unwinnable boards return winnable = false with the sows
/// made before getting stuck.
TchoukaillonPlan tchoukaillon_plan(const Occupation& board);

}  // namespace manqala
