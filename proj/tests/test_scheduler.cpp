#include "crossflow/scheduler.hpp"

#include <algorithm>

#include "crossflow/reference.hpp"
#include "crossflow/rng.hpp"
#include "support.hpp"

using namespace crossflow;

namespace
{
    int idx(const char* name) { return lane_index(*parse_lane(name)); }

    std::array<QueueDynamics, kLaneCount> make_queues()
    {
        std::array<QueueDynamics, kLaneCount> queues{};
        for (int i = 0; i < kLaneCount; ++i)
        {
            queues[i].lane = lane_from_index(i);
            queues[i].dwell_y = 15.0;
        }
        return queues;
    }

    std::array<bool, kLaneCount> all_open()
    {
        std::array<bool, kLaneCount> can{};
        can.fill(true);
        return can;
    }
} // namespace

static void test_update_matrix()
{
    ConflictMatrix m = make_matrix(ConflictRelation::defaults());
    for (int i = 0; i < kLaneCount; ++i)
        CHECK(m.diagonal[i] == 0);

    auto queues = make_queues();
    queues[idx("ER")].state = kActive;
    queues[idx("NR")].state = kActive;
    queues[idx("SF")].state = 3;
    update_matrix(m, queues);
    CHECK(m.diagonal[idx("ER")] == kActive);
    CHECK(m.diagonal[idx("NR")] == kActive);
    CHECK(m.diagonal[idx("SF")] == 3);
    CHECK(m.diagonal[idx("WL")] == 0);

    const ConflictMatrix before = m;
    update_matrix(m, queues); // same states: nothing moves
    CHECK(m.diagonal == before.diagonal);
    CHECK(m.relation == before.relation);

    // the off-diagonal relation is untouched by queue churn
    CHECK(m.relation.conflicts_idx(idx("ER"), idx("SF")));
}

static void test_selection_seeds_highest_priority()
{
    ConflictMatrix m = make_matrix(ConflictRelation::defaults());
    m.diagonal[idx("EL")] = 4;
    const Selection sel = select_open_set(m, all_open());
    CHECK(!sel.open.empty());
    CHECK(sel.open.front() == idx("EL"));
    // greedy fill around the seed, priority ties resolved by index
    const std::vector<int> expected = {idx("EL"), idx("WL"), idx("NR"), idx("SR")};
    CHECK(sel.open == expected);
    CHECK(sel.mark_wa.empty());
}

static void test_selection_two_level_example()
{
    ConflictMatrix m = make_matrix(ConflictRelation::defaults());
    m.diagonal[idx("EL")] = 4;
    m.diagonal[idx("EF")] = 3;
    const Selection sel = select_open_set(m, all_open());
    const std::vector<int> expected = {idx("EL"), idx("EF"), idx("ER"), idx("SR")};
    CHECK(sel.open == expected);
}

static void test_selection_result_is_conflict_free_and_maximal()
{
    Rng rng(derive_seed(21, 0));
    const ConflictRelation rel = ConflictRelation::defaults();
    ConflictMatrix m = make_matrix(rel);
    for (int trial = 0; trial < 500; ++trial)
    {
        std::array<bool, kLaneCount> can{};
        for (int i = 0; i < kLaneCount; ++i)
        {
            m.diagonal[i] = int(rng.uniform01() * 7.0) - 1;
            can[i] = rng.uniform01() < 0.7;
        }
        const Selection sel = select_open_set(m, can);

        for (std::size_t a = 0; a < sel.open.size(); ++a)
            for (std::size_t b = a + 1; b < sel.open.size(); ++b)
                CHECK(!rel.conflicts_idx(sel.open[a], sel.open[b]));

        // no openable lane outside the set, the running greens, their
        // conflicts, and the set's own scan could still join
        if (!sel.open.empty())
        {
            for (int i = 0; i < kLaneCount; ++i)
            {
                if (!can[i] || m.diagonal[i] < 0)
                    continue;
                if (std::find(sel.open.begin(), sel.open.end(), i) != sel.open.end())
                    continue;
                bool excluded = false;
                for (int j = 0; j < kLaneCount; ++j)
                    if (m.diagonal[j] < 0 && j != i && rel.conflicts_idx(i, j))
                        excluded = true;
                if (excluded)
                    continue;
                bool clashes = false;
                for (int member : sel.open)
                    if (member != i && rel.conflicts_idx(i, member))
                        clashes = true;
                CHECK(clashes); // otherwise the greedy fill missed it
            }
        }
    }
}

static void test_selection_waiting_active_outranks_levels()
{
    ConflictMatrix m = make_matrix(ConflictRelation::defaults());
    m.diagonal[idx("SF")] = kWaitingActive;
    m.diagonal[idx("EL")] = 4;
    const Selection sel = select_open_set(m, all_open());
    CHECK(sel.open.front() == idx("SF"));
    // EL fights SF, so it cannot ride along
    CHECK(std::find(sel.open.begin(), sel.open.end(), idx("EL")) == sel.open.end());
}

static void test_selection_marks_unopenable_as_waiting()
{
    ConflictMatrix m = make_matrix(ConflictRelation::defaults());
    m.diagonal[idx("EL")] = 4;
    m.diagonal[idx("WF")] = 3;
    auto can = all_open();
    can[idx("EL")] = false; // wants green but its exit is jammed
    const Selection sel = select_open_set(m, can);
    CHECK(sel.mark_wa == std::vector<int>{idx("EL")});
    CHECK(sel.open.front() == idx("WF"));
}

static void test_selection_skips_running_greens_and_their_conflicts()
{
    ConflictMatrix m = make_matrix(ConflictRelation::defaults());
    m.diagonal[idx("WR")] = kActive;
    m.diagonal[idx("NF")] = 4; // top priority, but it crosses the running WR
    const Selection sel = select_open_set(m, all_open());
    CHECK(std::find(sel.open.begin(), sel.open.end(), idx("NF")) == sel.open.end());
    CHECK(std::find(sel.open.begin(), sel.open.end(), idx("WR")) == sel.open.end());
    CHECK(std::find(sel.mark_wa.begin(), sel.mark_wa.end(), idx("NF")) == sel.mark_wa.end());
}

static void test_selection_nothing_openable()
{
    ConflictMatrix m = make_matrix(ConflictRelation::defaults());
    std::array<bool, kLaneCount> can{}; // junction empty: nobody can open
    const Selection sel = select_open_set(m, can);
    CHECK(sel.open.empty());
    std::vector<int> everyone(kLaneCount);
    for (int i = 0; i < kLaneCount; ++i)
        everyone[i] = i;
    CHECK(sel.mark_wa == everyone); // the whole field queues a claim
}

static void test_selection_deterministic()
{
    Rng rng(derive_seed(22, 0));
    ConflictMatrix m = make_matrix(ConflictRelation::defaults());
    for (int trial = 0; trial < 50; ++trial)
    {
        std::array<bool, kLaneCount> can{};
        for (int i = 0; i < kLaneCount; ++i)
        {
            m.diagonal[i] = int(rng.uniform01() * 7.0) - 1;
            can[i] = rng.uniform01() < 0.5;
        }
        const Selection first = select_open_set(m, can);
        const Selection second = select_open_set(m, can);
        CHECK(first.open == second.open);
        CHECK(first.mark_wa == second.mark_wa);
    }
}

static void test_selection_matches_reference()
{
    Rng rng(derive_seed(23, 0));
    const ConflictRelation rel = ConflictRelation::defaults();
    ConflictMatrix m = make_matrix(rel);
    for (int trial = 0; trial < 2000; ++trial)
    {
        std::array<bool, kLaneCount> can{};
        for (int i = 0; i < kLaneCount; ++i)
        {
            m.diagonal[i] = int(rng.uniform01() * 7.0) - 1;
            can[i] = rng.uniform01() < 0.6;
        }
        const Selection got = select_open_set(m, can);
        const reference::SelectionRef want = reference::open_set(rel, m.diagonal, can);
        CHECK(got.open == want.open);
        CHECK(got.mark_wa == want.wa);
    }
}

static void test_grant_green()
{
    ConflictMatrix m = make_matrix(ConflictRelation::defaults());
    auto queues = make_queues();
    queues[idx("EL")].state = kWaitingActive;
    queues[idx("WL")].state = 2;
    update_matrix(m, queues);

    std::array<double, kLaneCount> x{};
    x[idx("EL")] = 42.7;
    x[idx("WL")] = 3.0;
    const GreenPhase phase =
        grant_green(m, {idx("EL"), idx("WL")}, queues, x, 100.0, 30.0);
    CHECK(phase.granted_at == 100.0);
    CHECK(phase.grants.size() == 2);
    CHECK(phase.grants[0].lane == idx("EL"));
    CHECK(phase.grants[0].budget_s == 30.0); // clipped by the cap
    CHECK(phase.grants[0].truncated);
    CHECK(phase.grants[1].budget_s == 3.0);
    CHECK(!phase.grants[1].truncated);
    CHECK(queues[idx("EL")].state == kActive); // WaitingActive finally served
    CHECK(queues[idx("WL")].state == kActive);
    CHECK(m.diagonal[idx("EL")] == kActive);
}

static void test_grant_green_rejects_conflicts()
{
    ConflictMatrix m = make_matrix(ConflictRelation::defaults());
    auto queues = make_queues();
    std::array<double, kLaneCount> x{};
    x.fill(5.0);
    CHECK_THROWS(InvariantViolation,
                 grant_green(m, {idx("WR"), idx("EL")}, queues, x, 0.0, 30.0));

    // and against a green already running
    queues[idx("WF")].state = kActive;
    update_matrix(m, queues);
    CHECK_THROWS(InvariantViolation, grant_green(m, {idx("EL")}, queues, x, 0.0, 30.0));
}

static void test_truncation_reset()
{
    CHECK(truncation_reset_state(5.0, 30.0) == 0);  // drained inside the cap
    CHECK(truncation_reset_state(30.0, 30.0) == 0); // exactly on the cap
    CHECK(truncation_reset_state(60.0, 30.0) == 2); // half the queue left
    CHECK(truncation_reset_state(40.0, 30.0) == 1);
    CHECK(truncation_reset_state(1e9, 30.0) == 4); // cap cut nearly everything
    CHECK(truncation_reset_state(0.0, 30.0) == 0);
}

static void test_end_green()
{
    const DwellParams p{};
    auto queues = make_queues();
    QueueDynamics& q = queues[idx("NF")];
    q.state = kActive;
    q.emergency_flag = true;

    end_green(q, 8.0, p, 30.0, 500.0); // drained fully: restart at level 0
    CHECK(q.state == 0);
    CHECK(q.cycle_index == 1);
    CHECK_NEAR(q.dwell_y, 0.5 + 14.5 * std::pow(0.9, 8.0), 1e-12);
    CHECK(q.level_timer_start == 500.0);
    CHECK(!q.emergency_flag);

    q.state = kActive;
    end_green(q, 60.0, p, 30.0, 600.0); // cap cut half the queue: restart high
    CHECK(q.state == 2);
    CHECK(q.cycle_index == 2);
}

static void test_selection_respects_rule_edits()
{
    // tightening WR/WF keeps them out of one green set
    ConflictMatrix m = make_matrix(
        ConflictRelation::defaults().with_rule(*parse_lane("WR"), *parse_lane("WF"), true));
    m.diagonal[idx("WR")] = 4;
    m.diagonal[idx("WF")] = 3;
    const Selection sel = select_open_set(m, all_open());
    CHECK(sel.open.front() == idx("WR"));
    CHECK(std::find(sel.open.begin(), sel.open.end(), idx("WF")) == sel.open.end());
}

int main()
{
    test_update_matrix();
    test_selection_seeds_highest_priority();
    test_selection_two_level_example();
    test_selection_result_is_conflict_free_and_maximal();
    test_selection_waiting_active_outranks_levels();
    test_selection_marks_unopenable_as_waiting();
    test_selection_skips_running_greens_and_their_conflicts();
    test_selection_nothing_openable();
    test_selection_deterministic();
    test_selection_matches_reference();
    test_grant_green();
    test_grant_green_rejects_conflicts();
    test_truncation_reset();
    test_end_green();
    test_selection_respects_rule_edits();
    return test_summary("test_scheduler");
}
