#include <doctest.h>

#include <map>
#include <random>
#include <thread>

#include "mobility/notify/broker.hpp"

using namespace mobility::notify;

TEST_CASE("registration is idempotent and versioned") {
  Broker b("http://mobility.example/");
  b.register_device("reg1", "hash1", "3");
  b.register_device("reg1", "hash1", "3");
  CHECK(b.device_count() == 1);
  CHECK(b.is_registered("reg1", "3"));
  CHECK_FALSE(b.is_registered("reg1", "4"));
  CHECK_FALSE(b.is_registered("nope", "3"));
  CHECK_THROWS_AS(b.register_device("", "hash1", "3"), NotifyError);
}

TEST_CASE("a new regid for the same hash replaces the old one") {
  Broker b("http://mobility.example/");
  b.register_device("old", "hash1", "1");
  b.register_device("new", "hash1", "1");
  CHECK(b.device_count() == 1);
  CHECK(b.push("t", "b", std::string("old")) == 0);
  CHECK(b.push("t", "b", std::string("new")) == 1);
  CHECK_THROWS_WITH_AS(b.poll_inbox("old"), "unknown device", NotifyError);
}

TEST_CASE("push fans out and polling drains") {
  Broker b("http://mobility.example/");
  for (const auto* r : {"a", "b", "c"}) b.register_device(r, std::string("h") + r, "1");
  CHECK(b.push("New version", "Update now") == 3);
  CHECK(b.push("x", "y", std::string("ghost")) == 0);
  const auto inbox = b.poll_inbox("b");
  REQUIRE(inbox.size() == 1);
  CHECK(inbox[0].title == "New version");
  CHECK(inbox[0].body == "Update now");
  CHECK(inbox[0].click_url == "http://mobility.example/");
  CHECK(inbox[0].to_regid == "b");
  CHECK(b.poll_inbox("b").empty());
  CHECK(b.push("x", "y", std::string("a"), std::string("http://other/")) == 1);
  CHECK(b.poll_inbox("a").back().click_url == "http://other/");
  const auto j = inbox[0].to_json();
  CHECK(j["title"] == "New version");
  CHECK(j.contains("delivered_at"));
}

TEST_CASE("interleaved push and poll keep per-device order") {
  Broker b("h");
  b.register_device("d1", "u1", "1");
  b.register_device("d2", "u2", "1");
  std::mt19937 rng(1);
  std::map<std::string, int> next_expected{{"d1", 0}, {"d2", 0}};
  std::map<std::string, int> sent{{"d1", 0}, {"d2", 0}};
  bool ordered = true;
  for (int step = 0; step < 2000; ++step) {
    const std::string dev = rng() % 2 ? "d1" : "d2";
    if (rng() % 3) {
      b.push(std::to_string(sent[dev]++), "", dev);
    } else {
      for (const auto& m : b.poll_inbox(dev)) ordered = ordered && std::stoi(m.title) == next_expected[dev]++;
    }
  }
  for (const auto* dev : {"d1", "d2"}) {
    for (const auto& m : b.poll_inbox(dev)) ordered = ordered && std::stoi(m.title) == next_expected[dev]++;
    CHECK(next_expected[dev] == sent[dev]);
  }
  CHECK(ordered);
}

TEST_CASE("concurrent pushers lose nothing") {
  Broker b("h");
  b.register_device("d", "u", "1");
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&b] {
      for (int i = 0; i < 500; ++i) b.push("m", "", std::string("d"));
    });
  }
  std::size_t received = 0;
  for (int i = 0; i < 100; ++i) received += b.poll_inbox("d").size();
  for (auto& th : threads) th.join();
  received += b.poll_inbox("d").size();
  CHECK(received == 2000);
}
