#include "manqala/tchoukaillon.hpp"

#include <string>

#include "manqala/error.hpp"

namespace manqala {

Occupation sow(const Occupation& board, int pit) {
  if (pit < 1 || pit >= static_cast<int>(board.size())) {
    throw SiteRangeError("pit " + std::to_string(pit) + " outside the board");
  }
  const auto p = static_cast<std::size_t>(pit);
  if (board[p] != pit) {
    throw ArgumentError("pit " + std::to_string(pit) + " holds " +
                        std::to_string(board[p]) + " stones, sowing needs " +
                        std::to_string(pit));
  }
  Occupation out = board;
  out[p] = 0;
  for (std::size_t k = 0; k < p; ++k) ++out[k];
  return out;
}

TchoukaillonPlan tchoukaillon_plan(const Occupation& board) {
  TchoukaillonPlan plan;
  plan.final_board = board;
  auto empty_pits = [](const Occupation& b) {
    for (std::size_t k = 1; k < b.size(); ++k) {
      if (b[k] != 0) return false;
    }
    return true;
  };
  while (!empty_pits(plan.final_board)) {
    int chosen = 0;
    for (int d = 1; d < static_cast<int>(plan.final_board.size()); ++d) {
      if (plan.final_board[static_cast<std::size_t>(d)] == d) {
        chosen = d;
        break;
      }
    }
    if (chosen == 0) return plan;
    plan.sows.push_back({chosen, chosen});
    plan.final_board = sow(plan.final_board, chosen);
  }
  plan.winnable = true;
  return plan;
}

}  // namespace manqala
