#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string_view>
#include <vector>

namespace tasgnn::synthetic {

// Stand-in Web-of-Trust marketplace with the size and sign balance of the
// Bitcoin-Alpha rating network, used when the real edge list is absent.
// Honest users trade and mostly rate +1..+3; a fraud ring inflates its own
// reputation with strong mutual ratings, scams some honest users (who answer
// with strong distrust) and bad-mouths others; trolls rate at random.
enum class Role : std::uint8_t { kFounder, kHonest, kNewcomer, kFraudster, kAccomplice, kTroll };

std::string_view role_name(Role role);

struct Config {
  std::size_t num_nodes = 3783;
  std::size_t num_edges = 24186;
  std::uint64_t seed = 2024;
  std::size_t founders = 12;
  double fraudster_fraction = 0.05;
  double accomplice_fraction = 0.04;
  double newcomer_fraction = 0.30;
  double troll_fraction = 0.015;
  // Event mix per generated interaction; the remainder goes to honest users
  // extending small trust to accomplices.
  double trade_rate = 0.78;
  double wash_rate = 0.05;      // ring member rates a fraudster
  double ring_rate = 0.02;      // fraudster rates a ring member
  double scam_rate = 0.08;      // honest user trades with a fraudster
  double badmouth_rate = 0.035;
  double troll_rate = 0.015;
  double scam_detect = 0.50;    // victim answers with strong distrust
  double dispute_rate = 0.025;  // honest trade ending in a negative rating
};

struct Row {
  std::int64_t source;
  std::int64_t target;
  int rating;
  std::int64_t timestamp;
};

struct Network {
  std::vector<Row> rows;   // SNAP order: ids are 1-based
  std::vector<Role> roles;  // indexed by id - 1
};

Network generate(const Config& config);

void write_csv(std::ostream& out, const Network& network);
void save_csv(const std::filesystem::path& path, const Network& network);

// CSV `id,role` keyed by the 1-based ids used in the edge list.
void save_roles(const std::filesystem::path& path, const Network& network);

}  // namespace tasgnn::synthetic
