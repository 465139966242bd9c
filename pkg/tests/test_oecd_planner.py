"""Tests for prompt assembly and provider-reply handling in the table query planner."""

import datetime
import json

import pytest

from framecheck.gateway import Gateway, ProviderConfig, ProviderKind
from framecheck.model import Claim
from framecheck.oecd.planner import NotAvailable, PlanStage, build_prompt, plan_query
from framecheck.oecd.query import PlanRejectedError, QueryPlan, execute_plan
from framecheck.oecd.schema_doc import SchemaDoc, schema_doc_for


def chat_gateway(transport):
    config = ProviderConfig(
        kind=ProviderKind.REMOTE_CHAT, model_name="test-model", endpoint="local://test"
    )
    return Gateway(config, transport=transport)


def reply_with(**overrides) -> str:
    body = {
        "table_id": "life_expectancy",
        "filters": [],
        "select_columns": [],
        "aggregation": None,
        "not_available": False,
    }
    body.update(overrides)
    return json.dumps(body)


def scripted(*replies):
    """Transport that pops canned replies and records the prompts it saw."""
    queue = list(replies)
    prompts = []

    def transport(config, prompt, params):
        prompts.append(prompt)
        return queue.pop(0)

    return transport, prompts


@pytest.fixture
def claim():
    return Claim(
        id="c1",
        text="Japan has the 2nd highest life expectancy in the world.",
        claim_date=datetime.date(2021, 5, 1),
    )


@pytest.fixture
def life_doc(table_store):
    return schema_doc_for(table_store.get_table("life_expectancy"), "life expectancy")


class TestBuildPrompt:
    def test_retrieve_prompt_leads_with_claim_then_schemas(self, claim, life_doc):
        prompt = build_prompt(claim, PlanStage.RETRIEVE, [life_doc])
        assert prompt.startswith(
            "You are preparing a database query to gather evidence for"
            " fact-checking a claim.\n\n"
            "Claim: Japan has the 2nd highest life expectancy in the world.\n\n"
            "Candidate tables:\nTABLE life_expectancy (\n"
        )

    def test_retrieve_prompt_offers_every_schema(self, claim, life_doc, table_store):
        pop_doc = schema_doc_for(table_store.get_table("population"), claim.text)
        prompt = build_prompt(claim, PlanStage.RETRIEVE, [life_doc, pop_doc])
        assert life_doc.rendered in prompt
        assert pop_doc.rendered in prompt

    def test_retrieve_prompt_states_reply_contract(self, claim, life_doc):
        prompt = build_prompt(claim, PlanStage.RETRIEVE, [life_doc])
        assert '"op": "equals|contains|lte|gte|in"' in prompt
        assert 'reply {"not_available": true, "reason": "..."}' in prompt
        assert prompt.rstrip().endswith("Reply with only the JSON object.")

    def test_clean_prompt_embeds_result_preview(self, claim, life_doc, table_store):
        frame = execute_plan(
            table_store.get_table("life_expectancy"),
            QueryPlan(table_id="life_expectancy", filters=(), select_columns=()),
        )
        prompt = build_prompt(claim, PlanStage.CLEAN, [life_doc], prior_result=frame)
        assert prompt.startswith("You are refining evidence for fact-checking a claim.")
        assert (
            "First query result (24 rows), first 10 shown as tab-separated values:"
            in prompt
        )
        assert "country\tyear\tvalue" in prompt

    def test_clean_prompt_notes_truncation(self, claim, life_doc, table_store):
        frame = execute_plan(
            table_store.get_table("life_expectancy"),
            QueryPlan(table_id="life_expectancy", filters=(), select_columns=()),
            row_cap=5,
        )
        prompt = build_prompt(claim, PlanStage.CLEAN, [life_doc], prior_result=frame)
        assert (
            "First query result (5 rows, truncated), first 5 shown" in prompt
        )

    def test_clean_stage_needs_the_first_result(self, claim, life_doc):
        with pytest.raises(ValueError, match="retrieve-stage result"):
            build_prompt(claim, PlanStage.CLEAN, [life_doc])

    def test_clean_stage_needs_exactly_one_schema(self, claim, life_doc, table_store):
        frame = execute_plan(
            table_store.get_table("life_expectancy"),
            QueryPlan(table_id="life_expectancy", filters=(), select_columns=()),
        )
        pop_doc = schema_doc_for(table_store.get_table("population"), claim.text)
        with pytest.raises(ValueError, match="exactly the chosen table"):
            build_prompt(
                claim, PlanStage.CLEAN, [life_doc, pop_doc], prior_result=frame
            )


class TestReplyParsing:
    def test_valid_reply_becomes_validated_plan(self, claim, life_doc, table_store):
        transport, prompts = scripted(
            reply_with(
                filters=[{"column": "country", "op": "equals", "value": "Japan"}],
                select_columns=["country", "year", "value"],
            )
        )
        plan = plan_query(
            chat_gateway(transport), claim, PlanStage.RETRIEVE, [life_doc], table_store
        )
        assert isinstance(plan, QueryPlan)
        assert plan.table_id == "life_expectancy"
        assert plan.filters[0].column == "country"
        assert plan.select_columns == ("country", "year", "value")
        assert len(prompts) == 1

    @pytest.mark.parametrize(
        ("alias", "canonical"),
        [
            ("eq", "equals"),
            ("=", "equals"),
            ("==", "equals"),
            ("LIKE", "contains"),
            ("<=", "lte"),
            ("le", "lte"),
            (">=", "gte"),
            ("ge", "gte"),
        ],
    )
    def test_op_aliases_normalize(self, claim, life_doc, table_store, alias, canonical):
        column, value = ("country", "Japan")
        if canonical in ("lte", "gte"):
            column, value = ("value", 80)
        transport, _ = scripted(
            reply_with(filters=[{"column": column, "op": alias, "value": value}])
        )
        plan = plan_query(
            chat_gateway(transport), claim, PlanStage.RETRIEVE, [life_doc], table_store
        )
        assert plan.filters[0].op == canonical

    def test_in_filter_list_becomes_tuple(self, claim, life_doc, table_store):
        transport, _ = scripted(
            reply_with(
                filters=[{"column": "country", "op": "in", "value": ["Japan", "Chile"]}]
            )
        )
        plan = plan_query(
            chat_gateway(transport), claim, PlanStage.RETRIEVE, [life_doc], table_store
        )
        assert plan.filters[0].value == ("Japan", "Chile")

    def test_code_fenced_reply_accepted(self, claim, life_doc, table_store):
        transport, _ = scripted("```json\n" + reply_with() + "\n```")
        plan = plan_query(
            chat_gateway(transport), claim, PlanStage.RETRIEVE, [life_doc], table_store
        )
        assert isinstance(plan, QueryPlan)

    def test_aggregation_parsed_with_lowercased_function(
        self, claim, life_doc, table_store
    ):
        transport, _ = scripted(
            reply_with(
                select_columns=["year", "value"],
                aggregation={"function": "SUM", "group_by": ["year"]},
            )
        )
        plan = plan_query(
            chat_gateway(transport), claim, PlanStage.RETRIEVE, [life_doc], table_store
        )
        assert plan.aggregation is not None
        assert plan.aggregation.func == "sum"
        assert plan.aggregation.group_by == ("year",)

    @pytest.mark.parametrize("agg", [None, {"function": "none"}, {"function": ""}])
    def test_absent_or_none_aggregation(self, claim, life_doc, table_store, agg):
        transport, _ = scripted(reply_with(aggregation=agg))
        plan = plan_query(
            chat_gateway(transport), claim, PlanStage.RETRIEVE, [life_doc], table_store
        )
        assert plan.aggregation is None

    def test_declared_not_available_carries_reason(self, claim, life_doc, table_store):
        transport, _ = scripted(
            json.dumps({"not_available": True, "reason": "no vital statistics"})
        )
        out = plan_query(
            chat_gateway(transport), claim, PlanStage.RETRIEVE, [life_doc], table_store
        )
        assert isinstance(out, NotAvailable)
        assert out.reason == "no vital statistics"

    def test_not_available_without_reason_gets_default(
        self, claim, life_doc, table_store
    ):
        transport, _ = scripted(json.dumps({"not_available": True}))
        out = plan_query(
            chat_gateway(transport), claim, PlanStage.RETRIEVE, [life_doc], table_store
        )
        assert out.reason == "no data available"


class TestRepair:
    def test_unoffered_table_gets_one_repair_round(self, claim, life_doc, table_store):
        transport, prompts = scripted(
            reply_with(table_id="population"), reply_with()
        )
        plan = plan_query(
            chat_gateway(transport), claim, PlanStage.RETRIEVE, [life_doc], table_store
        )
        assert isinstance(plan, QueryPlan)
        assert len(prompts) == 2
        assert prompts[1].startswith(prompts[0])
        assert (
            "Your previous reply was rejected: table_id 'population' is not one"
            " of the offered tables (life_expectancy)" in prompts[1]
        )
        assert prompts[1].rstrip().endswith(
            "Reply again with only a corrected JSON object."
        )

    def test_validation_failure_reason_reaches_repair_prompt(
        self, claim, life_doc, table_store
    ):
        transport, prompts = scripted(
            reply_with(filters=[{"column": "planet", "op": "equals", "value": "x"}]),
            reply_with(),
        )
        plan = plan_query(
            chat_gateway(transport), claim, PlanStage.RETRIEVE, [life_doc], table_store
        )
        assert isinstance(plan, QueryPlan)
        assert "filter references column 'planet'" in prompts[1]

    def test_malformed_json_reason_names_the_parse_error(
        self, claim, life_doc, table_store
    ):
        transport, prompts = scripted("not json at all", reply_with())
        plan_query(
            chat_gateway(transport), claim, PlanStage.RETRIEVE, [life_doc], table_store
        )
        assert "reply is not valid JSON" in prompts[1]

    def test_second_rejection_raises(self, claim, life_doc, table_store):
        transport, prompts = scripted("still not json", "also not json")
        with pytest.raises(PlanRejectedError, match="not valid JSON"):
            plan_query(
                chat_gateway(transport),
                claim,
                PlanStage.RETRIEVE,
                [life_doc],
                table_store,
            )
        assert len(prompts) == 2


class TestAvailability:
    def test_no_offered_tables_skips_the_provider(self, claim, table_store):
        transport, prompts = scripted()
        out = plan_query(
            chat_gateway(transport), claim, PlanStage.RETRIEVE, [], table_store
        )
        assert isinstance(out, NotAvailable)
        assert out.reason == "no offered table has ingested data"
        assert prompts == []

    def test_described_but_uningested_table_is_not_offered(self, claim, table_store):
        # gdp_growth has a descriptor but no CSV behind it
        ghost = SchemaDoc(table_id="gdp_growth", rendered="TABLE gdp_growth (\n)\n")
        transport, prompts = scripted()
        out = plan_query(
            chat_gateway(transport), claim, PlanStage.RETRIEVE, [ghost], table_store
        )
        assert isinstance(out, NotAvailable)
        assert prompts == []

    def test_uningested_table_excluded_from_offered_set(
        self, claim, life_doc, table_store
    ):
        ghost = SchemaDoc(table_id="gdp_growth", rendered="TABLE gdp_growth (\n)\n")
        transport, prompts = scripted(reply_with(table_id="gdp_growth"), reply_with())
        plan = plan_query(
            chat_gateway(transport),
            claim,
            PlanStage.RETRIEVE,
            [ghost, life_doc],
            table_store,
        )
        assert isinstance(plan, QueryPlan)
        assert "(life_expectancy)" in prompts[1]

    def test_far_date_becomes_not_available(self, claim, life_doc, table_store):
        transport, _ = scripted(
            reply_with(filters=[{"column": "year", "op": "equals", "value": "1955"}])
        )
        out = plan_query(
            chat_gateway(transport), claim, PlanStage.RETRIEVE, [life_doc], table_store
        )
        assert isinstance(out, NotAvailable)
        assert out.reason == "no 'year' value near 1955"

    def test_far_date_in_repair_reply_also_not_available(
        self, claim, life_doc, table_store
    ):
        transport, prompts = scripted(
            "garbage",
            reply_with(filters=[{"column": "year", "op": "equals", "value": "1955"}]),
        )
        out = plan_query(
            chat_gateway(transport), claim, PlanStage.RETRIEVE, [life_doc], table_store
        )
        assert isinstance(out, NotAvailable)
        assert len(prompts) == 2


class TestClaimContext:
    def test_claim_text_drives_first_person_widening(self, life_doc, table_store):
        us_claim = Claim(id="c2", text="We live longer than people in Japan.")
        transport, _ = scripted(
            reply_with(filters=[{"column": "country", "op": "equals", "value": "Japan"}])
        )
        plan = plan_query(
            chat_gateway(transport),
            us_claim,
            PlanStage.RETRIEVE,
            [life_doc],
            table_store,
        )
        assert plan.filters[0].op == "in"
        assert "United States" in plan.filters[0].value
        assert any("widened" in note for note in plan.rewrites)

    def test_date_substitution_recorded_on_the_plan(self, claim, life_doc, table_store):
        transport, _ = scripted(
            reply_with(filters=[{"column": "year", "op": "equals", "value": "2014"}])
        )
        plan = plan_query(
            chat_gateway(transport), claim, PlanStage.RETRIEVE, [life_doc], table_store
        )
        assert plan.date_substitution is not None
        assert plan.date_substitution.requested == "2014"
        assert plan.date_substitution.substituted == "2019"

    def test_clean_stage_round_trip(self, claim, life_doc, table_store):
        frame = execute_plan(
            table_store.get_table("life_expectancy"),
            QueryPlan(table_id="life_expectancy", filters=(), select_columns=()),
        )
        transport, prompts = scripted(
            reply_with(
                filters=[{"column": "country", "op": "equals", "value": "Japan"}],
                select_columns=["country", "value"],
            )
        )
        plan = plan_query(
            chat_gateway(transport),
            claim,
            PlanStage.CLEAN,
            [life_doc],
            table_store,
            prior_result=frame,
        )
        assert isinstance(plan, QueryPlan)
        assert prompts[0].startswith("You are refining evidence")
