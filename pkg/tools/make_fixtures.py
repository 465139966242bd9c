#!/usr/bin/env python3
"""Regenerate the committed test fixtures.

Writes the synthetic congressional corpus (members, bills, roll calls,
votes), the statistics tables, the agent-matching cases, the gold files,
the survey corpus, and the small hand-checked BM25 corpus. Everything is
deterministic; run from the repository root:

    python3 tools/make_fixtures.py
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

from framecheck.model import (
    Claim,
    FrameElement,
    FrameInstance,
    GoldRecord,
    Span,
    claim_to_dict,
    parse_verdict_label,
    write_gold_records,
)

ROOT = Path(__file__).resolve().parents[1]
FIX = ROOT / "tests" / "fixtures"


def write_jsonl(path: Path, records: list[dict]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")


def write_json(path: Path, payload) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")


def write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def member(bioguide: str, full_name: str, preferred: list[str], terms: list[tuple]) -> dict:
    return {
        "bioguide_id": bioguide,
        "full_name": full_name,
        "preferred_names": preferred,
        "terms": [{"start": s, "end": e, "chamber": c} for s, e, c in terms],
    }


# --- members ----------------------------------------------------------------

MEMBERS = [
    member("B000444", "Joseph Robinette Biden", ["Joe Biden"],
           [("1997-01-07", "2003-01-07", "senate"), ("2003-01-07", "2009-01-15", "senate")]),
    member("C001041", "Hillary Rodham Clinton", ["Hillary Clinton"],
           [("2001-01-03", "2007-01-04", "senate"), ("2007-01-04", "2009-01-21", "senate")]),
    member("C001098", "Rafael Edward Cruz", ["Ted Cruz"],
           [("2013-01-03", "2019-01-03", "senate"), ("2019-01-03", "2025-01-03", "senate")]),
    member("D000563", "Richard Joseph Durbin", ["Dick Durbin"],
           [("2009-01-06", "2015-01-06", "senate"), ("2015-01-06", "2021-01-03", "senate")]),
    member("D000621", "Ronald Dion DeSantis", ["Ron DeSantis"],
           [("2013-01-03", "2018-09-10", "house")]),
    member("G000386", "Charles Ernest Grassley", ["Chuck Grassley"],
           [("2011-01-05", "2017-01-03", "senate"), ("2017-01-03", "2023-01-03", "senate")]),
    member("K000105", "Edward Moore Kennedy", ["Ted Kennedy"],
           [("2001-01-03", "2007-01-04", "senate"), ("2007-01-04", "2009-08-25", "senate")]),
    member("K000393", "John Neely Kennedy", ["John Kennedy"],
           [("2017-01-03", "2023-01-03", "senate")]),
    member("M000639", "Robert Menendez", ["Bob Menendez"],
           [("2013-01-03", "2019-01-03", "senate"), ("2019-01-03", "2025-01-03", "senate")]),
    member("R000595", "Marco Antonio Rubio", ["Marco Rubio"],
           [("2011-01-05", "2017-01-03", "senate"), ("2017-01-03", "2023-01-03", "senate")]),
    member("R000615", "Willard Mitt Romney", ["Mitt Romney"],
           [("2019-01-03", "2025-01-03", "senate")]),
    member("S000033", "Bernard Sanders", ["Bernie Sanders"],
           [("2013-01-03", "2019-01-03", "senate"), ("2019-01-03", "2025-01-03", "senate")]),
    member("S000148", "Charles Ellis Schumer", ["Chuck Schumer"],
           [("2011-01-05", "2017-01-03", "senate"), ("2017-01-03", "2023-01-03", "senate")]),
    member("U000038", "Mark Emery Udall", ["Mark Udall"],
           [("2009-01-06", "2015-01-06", "senate")]),
    member("U000039", "Thomas Stewart Udall", ["Tom Udall"],
           [("2009-01-06", "2015-01-06", "senate"), ("2015-01-06", "2021-01-03", "senate")]),
    member("W000817", "Elizabeth Ann Warren", ["Elizabeth Warren"],
           [("2013-01-03", "2019-01-03", "senate"), ("2019-01-03", "2025-01-03", "senate")]),
]


# --- bills ------------------------------------------------------------------

GOLD_BILLS = [
    ("s1925-112", "Violence Against Women Reauthorization Act of 2012",
     "A bipartisan bill to reauthorize grant programs of the Violence Against Women Act, "
     "expanding protections for victims of domestic violence, dating violence, sexual "
     "assault, and stalking."),
    ("s610-117", "Protecting Medicare and American Farmers from Sequester Cuts Act",
     "Creates a fast-track process for the debt limit and delays the scheduled sequester "
     "cuts to Medicare payments through the fiscal year."),
    ("s1301-117", "A bill to increase the statutory debt ceiling of the United States",
     "Raises the debt ceiling so the Treasury can keep borrowing to pay obligations "
     "already incurred."),
    ("hr1868-117", "An Act to prevent across-the-board direct spending cuts",
     "Extends the suspension of the two percent Medicare sequester payment cuts and "
     "exempts pandemic relief from pay-as-you-go rules."),
    ("hjres114-107", "Authorization for Use of Military Force Against Iraq Resolution of 2002",
     "Authorizes the President to use the Armed Forces against Iraq; the resolution "
     "that opened the Iraq war."),
    ("hr152-113", "Disaster Relief Appropriations Act, 2013",
     "Supplemental appropriations for disaster relief: recovery aid to hurricane victims "
     "and communities struck by Hurricane Sandy."),
    ("hr3162-107", "Uniting and Strengthening America by Providing Appropriate Tools Required "
     "to Intercept and Obstruct Terrorism Act of 2001",
     "The USA Patriot Act: expands surveillance and investigative powers to deter and "
     "punish terrorist acts."),
    ("hr1-115", "Tax Cuts and Jobs Act",
     "Amends the Internal Revenue Code to reduce income tax rates for individuals and "
     "corporations; the largest tax cuts package in decades."),
    ("hr3590-111", "Patient Protection and Affordable Care Act",
     "Comprehensive health insurance reform expanding affordable coverage, known as the "
     "Affordable Care Act."),
    ("s2511-115", "Border Security and Deferred Action Recipient Relief Act",
     "Appropriates twenty-five billion dollars of border wall funding for physical "
     "barriers along the southern border."),
    ("s1733-111", "Clean Energy Jobs and American Power Act",
     "Caps greenhouse gas emissions and promotes clean energy jobs and renewable power."),
    ("s460-113", "Minimum Wage Fairness Act",
     "Raises the federal minimum wage in stages to ten dollars and ten cents per hour."),
    ("s2155-115", "Economic Growth, Regulatory Relief, and Consumer Protection Act",
     "Rolls back Dodd-Frank rules for banks, a bank deregulation measure raising the "
     "enhanced supervision threshold."),
    ("hr3684-117", "Infrastructure Investment and Jobs Act",
     "The bipartisan infrastructure bill: funds roads, bridges, transit, rail, "
     "broadband, and water infrastructure."),
    ("hr8-116", "Bipartisan Background Checks Act of 2019",
     "Requires a background check for every firearm sale, expanding background checks "
     "to gun purchases between private parties."),
    ("hr1424-110", "Emergency Economic Stabilization Act of 2008",
     "Authorizes the Treasury to purchase troubled assets: the seven hundred billion "
     "dollar bailout of the big banks."),
    ("hr2642-113", "Federal Agriculture Reform and Risk Management Act of 2013",
     "Farm bill making a deep cut to food stamps by reducing Supplemental Nutrition "
     "Assistance Program benefits."),
    ("s256-109", "Bankruptcy Abuse Prevention and Consumer Protection Act of 2005",
     "Overhauls the bankruptcy code, making it harder for consumers to erase debts; "
     "known as the bankruptcy bill."),
    ("s2543-116", "Prescription Drug Pricing Reduction Act of 2019",
     "Lowers prescription drug prices by capping price increases in Medicare Part D."),
    ("sjres52-115", "A joint resolution providing for congressional disapproval of the rule "
     "on Restoring Internet Freedom",
     "Would restore the net neutrality rules for broadband internet access service."),
    ("hr6395-116", "National Defense Authorization Act for Fiscal Year 2021",
     "Authorizes the defense budget: appropriations for the Department of Defense and "
     "military construction."),
    ("hr3233-117", "National Commission to Investigate the January 6 Attack on the United "
     "States Capitol Complex Act",
     "Establishes an independent January 6 commission to investigate the attack on the "
     "Capitol."),
]

TRAP_NAMES = [
    ("hr5201-115", "Marco Rubio", "West Miami"),
    ("hr5202-115", "Chuck Grassley", "Cedar Falls"),
    ("hr5203-115", "Bernie Sanders", "Burlington"),
    ("hr5204-115", "Ted Cruz", "Houston"),
    ("hr5205-115", "Joe Biden", "Wilmington"),
    ("hr5206-115", "Chuck Schumer", "Brooklyn"),
    ("hr5207-115", "Dick Durbin", "Springfield"),
    ("hr5208-115", "Bob Menendez", "Union City"),
    ("hr5209-115", "Tom Udall", "Santa Fe"),
    ("hr5210-115", "Elizabeth Warren", "Cambridge"),
    ("hr5211-115", "Mitt Romney", "Salt Lake City"),
    ("hr5212-115", "John Kennedy", "Baton Rouge"),
    ("hr5213-115", "Ron DeSantis", "Palm Coast"),
    ("hr5214-115", "Hillary Clinton", "Chappaqua"),
]

TRAP_BILLS = [
    (bill_id, f"{name} Post Office Building Designation Act",
     f"Names the {city} post office for {name}.")
    for bill_id, name, city in TRAP_NAMES
]

OTHER_BILLS = [
    ("hr350-117", "Domestic Terrorism Prevention Act of 2022",
     "Directs federal agencies to monitor, investigate, and prosecute domestic terrorism."),
    ("s601-113", "Water Resources Development Act of 2013",
     "Authorizes the Army Corps of Engineers to carry out water infrastructure projects "
     "in Washington and other states."),
    ("s2104-113", "Washington Metropolitan Area Transit Improvement Act",
     "Funds safety upgrades for the Washington Metro system serving Washington, the "
     "national capital."),
    ("hr4660-113", "Commerce, Justice, Science, and Related Agencies Appropriations Act",
     "Annual appropriations for the Departments of Commerce and Justice and for science "
     "agencies."),
    ("s2012-114", "Energy Policy Modernization Act of 2016",
     "Updates federal energy efficiency, infrastructure, and supply programs."),
    ("s2629-114", "United States Postal Service Reform Act",
     "Reforms United States Postal Service finances and delivery standards."),
    ("hr22-114", "Fixing America's Surface Transportation Act",
     "Long-term funding for highways, transit, and rail across America."),
    ("s178-114", "Justice for Victims of Trafficking Act of 2015",
     "Strengthens services and restitution for victims of human trafficking."),
    ("hr34-114", "21st Century Cures Act",
     "Accelerates medical product development and funds health research."),
    ("s524-114", "Comprehensive Addiction and Recovery Act of 2016",
     "Expands prevention and treatment programs for opioid addiction."),
    ("s442-115", "National Aeronautics and Space Administration Transition Authorization Act",
     "Sets priorities for United States human space exploration programs."),
    ("hr3877-116", "Bipartisan Budget Act of 2019",
     "Suspends the debt limit and raises discretionary spending caps for two years."),
    ("s785-116", "Commander John Scott Hannon Veterans Mental Health Care Improvement Act",
     "Improves mental health care services for veterans."),
    ("hr5376-117", "Build Back Better Act",
     "Budget reconciliation package for climate programs, health coverage, and family "
     "benefits."),
]

ALL_BILLS = GOLD_BILLS + TRAP_BILLS + OTHER_BILLS

ROLLCALLS = [
    ("rc-s1925-112-2", "s1925-112", "2012-04-26", "On Passage of the Bill"),
    ("rc-s610-117-1", "s610-117", "2021-12-09", "On Passage of the Bill"),
    ("rc-s1301-117-1", "s1301-117", "2021-10-07", "On Passage of the Bill"),
    ("rc-hr1868-117-2", "hr1868-117", "2021-03-25", "On Passage of the Bill"),
    ("rc-hr3233-117-1", "hr3233-117", "2021-05-28", "On Passage of the Bill"),
    ("rc-hr350-117-1", "hr350-117", "2022-05-26", "On Passage of the Bill"),
]

VOTES = [
    ("R000595", "rc-s1925-112-2", "Nay"),
    ("G000386", "rc-s610-117-1", "Nay"),
    ("G000386", "rc-s1301-117-1", "Nay"),
    ("G000386", "rc-hr1868-117-2", "Yea"),
]


# --- small congress corpus (exact counts: 6 bills, 4 members, 10 roll calls) --

SMALL_MEMBERS = [m for m in MEMBERS if m["bioguide_id"] in
                 ("R000595", "S000148", "U000038", "U000039")]

SMALL_BILLS = [
    GOLD_BILLS[0],  # s1925-112
    ("s47-113", "Violence Against Women Reauthorization Act of 2013",
     "Reauthorizes grant programs for victims of domestic violence and sexual assault "
     "through fiscal year 2018."),
    ("hr3590-111", "Patient Protection and Affordable Care Act",
     "Comprehensive health insurance reform expanding affordable coverage."),
    ("s744-113", "Border Security, Economic Opportunity, and Immigration Modernization Act",
     "Comprehensive immigration reform with a path to citizenship and stronger border "
     "enforcement."),
    ("hr1-115", "Tax Cuts and Jobs Act",
     "Reduces income tax rates for individuals and corporations."),
    ("hr1868-117", "An Act to prevent across-the-board direct spending cuts",
     "Extends the suspension of Medicare sequester payment reductions."),
]

SMALL_ROLLCALLS = [
    ("rc-s1925-112-1", "s1925-112", "2012-04-25", "On the Motion to Proceed"),
    ("rc-s1925-112-2", "s1925-112", "2012-04-26", "On Passage of the Bill"),
    ("rc-s47-113-1", "s47-113", "2013-02-12", "On Passage of the Bill"),
    # two non-passage roll calls: lookup must take the later date
    ("rc-s744-113-1", "s744-113", "2013-06-24", "On Cloture on the Motion to Proceed"),
    ("rc-s744-113-2", "s744-113", "2013-06-27", "On the Motion to Table Amendment 1183"),
    ("rc-hr3590-111-1", "hr3590-111", "2009-12-24", "On Passage of the Bill"),
    # passage is earlier than the recommit vote: lookup must still prefer passage
    ("rc-hr1-115-1", "hr1-115", "2017-12-19", "On Passage of the Bill"),
    ("rc-hr1-115-2", "hr1-115", "2017-12-20", "On the Motion to Recommit"),
    ("rc-hr1868-117-1", "hr1868-117", "2021-03-24", "On the Motion to Proceed"),
    ("rc-hr1868-117-2", "hr1868-117", "2021-03-25", "On Passage of the Bill"),
]

SMALL_VOTES = [
    ("R000595", "rc-s1925-112-1", "Yea"),
    ("R000595", "rc-s1925-112-2", "Nay"),
    ("S000148", "rc-s1925-112-2", "Yea"),
    ("U000038", "rc-s1925-112-2", "Yea"),
    ("U000039", "rc-s47-113-1", "Yea"),
    ("R000595", "rc-s744-113-1", "Nay"),
    ("R000595", "rc-s744-113-2", "Yea"),
    ("R000595", "rc-hr1-115-1", "Yea"),
    ("S000148", "rc-hr1-115-1", "Nay"),
]


# --- agent-matching cases ---------------------------------------------------

AGENT_CASES = [
    # nickname table hits
    {"surface": "Sleepy Joe", "bioguide_id": "B000444", "kind": "nickname"},
    {"surface": "Amtrak Joe", "bioguide_id": "B000444", "kind": "nickname"},
    {"surface": "Meatball Ron", "bioguide_id": "D000621", "kind": "nickname"},
    {"surface": "Little Marco", "bioguide_id": "R000595", "kind": "nickname"},
    {"surface": "Lyin' Ted", "bioguide_id": "C001098", "kind": "nickname"},
    {"surface": "Crooked Hillary", "bioguide_id": "C001041", "kind": "nickname"},
    # informal first names resolved through formal expansions
    {"surface": "Ted Cruz", "bioguide_id": "C001098", "kind": "preferred"},
    {"surface": "Chuck Grassley", "bioguide_id": "G000386", "kind": "preferred"},
    {"surface": "Chuck Schumer", "bioguide_id": "S000148", "kind": "preferred"},
    {"surface": "Dick Durbin", "bioguide_id": "D000563", "kind": "preferred"},
    {"surface": "Bob Menendez", "bioguide_id": "M000639", "kind": "preferred"},
    {"surface": "Bernie Sanders", "bioguide_id": "S000033", "kind": "preferred"},
    {"surface": "Tom Udall", "bioguide_id": "U000039", "kind": "preferred"},
    {"surface": "Liz Warren", "bioguide_id": "W000817", "kind": "preferred"},
    # bare surnames shared by two members: most recent term wins
    {"surface": "Udall", "bioguide_id": "U000039", "kind": "ambiguous"},
    {"surface": "Kennedy", "bioguide_id": "K000393", "kind": "ambiguous"},
    # exact full names
    {"surface": "Rafael Edward Cruz", "bioguide_id": "C001098", "kind": "exact"},
    {"surface": "Marco Antonio Rubio", "bioguide_id": "R000595", "kind": "exact"},
    {"surface": "Thomas Stewart Udall", "bioguide_id": "U000039", "kind": "exact"},
    # name extraction from noisy surfaces
    {"surface": "Sen. Marco Rubio", "bioguide_id": "R000595", "kind": "extraction"},
    {"surface": "Senator Bernie Sanders's", "bioguide_id": "S000033", "kind": "extraction"},
    {"surface": "Rep. Ron DeSantis", "bioguide_id": "D000621", "kind": "extraction"},
    {"surface": "Florida Sen. Marco Rubio", "bioguide_id": "R000595", "kind": "extraction"},
    {"surface": "Mitt Romney", "bioguide_id": "R000615", "kind": "extraction"},
    {"surface": "John Kennedy", "bioguide_id": "K000393", "kind": "extraction"},
]


# --- statistics tables ------------------------------------------------------

CYV = [{"name": "country", "kind": "text"}, {"name": "year", "kind": "date"},
       {"name": "value", "kind": "numeric"}]

LIFE_EXPECTANCY = {
    2019: {"Australia": 82.9, "Canada": 82.1, "France": 82.8, "Germany": 81.2,
           "Italy": 83.1, "Japan": 84.3, "Korea": 83.2, "Mexico": 75.0,
           "Norway": 82.9, "Spain": 83.8, "Switzerland": 83.9, "United States": 78.9},
    2021: {"Australia": 83.3, "Canada": 81.9, "France": 82.3, "Germany": 80.8,
           "Italy": 82.7, "Japan": 84.5, "Korea": 83.6, "Mexico": 70.2,
           "Norway": 83.2, "Spain": 83.3, "Switzerland": 84.0, "United States": 76.4},
}

HOURS_WORKED = {
    2012: {"Canada": 1721, "France": 1490, "Germany": 1375, "Japan": 1745,
           "Korea": 2163, "Mexico": 2226, "Norway": 1420, "United States": 1789},
    2016: {"Canada": 1703, "France": 1472, "Germany": 1363, "Japan": 1713,
           "Korea": 2068, "Mexico": 2255, "Norway": 1416, "United States": 1783},
}

HEALTH_COVERAGE = {
    2019: {"Canada": 100.0, "France": 99.9, "Germany": 99.9, "Japan": 100.0,
           "Korea": 100.0, "Mexico": 72.1, "United Kingdom": 100.0, "United States": 90.8},
    2021: {"Canada": 100.0, "France": 99.9, "Germany": 99.9, "Japan": 100.0,
           "Korea": 100.0, "Mexico": 73.5, "United Kingdom": 100.0, "United States": 91.4},
}

POPULATION = {
    2019: {"Canada": 37.6, "China": 1407.7, "France": 67.2, "Germany": 83.1,
           "India": 1383.1, "Indonesia": 266.9, "Italy": 59.7, "Japan": 126.2,
           "Mexico": 125.9, "United States": 328.3},
    2021: {"Canada": 38.2, "China": 1412.4, "France": 67.7, "Germany": 83.2,
           "India": 1393.4, "Indonesia": 273.8, "Italy": 59.1, "Japan": 125.7,
           "Mexico": 126.7, "United States": 331.9},
}

# (country, year) -> (national currency value, USD value)
AVERAGE_WAGES = {
    ("Denmark", 2020): (428574, 58430), ("Denmark", 2021): (437286, 61331),
    ("France", 2020): (39073, 45581), ("France", 2021): (39971, 47112),
    ("Germany", 2020): (47700, 53745), ("Germany", 2021): (49192, 56085),
    ("Iceland", 2020): (9240000, 67488), ("Iceland", 2021): (9672000, 72047),
    ("Japan", 2020): (4432000, 38151), ("Japan", 2021): (4443000, 39711),
    ("Norway", 2020): (612720, 54907), ("Norway", 2021): (637080, 57752),
    ("Switzerland", 2020): (90180, 64824), ("Switzerland", 2021): (90726, 66567),
    ("United States", 2020): (71456, 71456), ("United States", 2021): (74738, 74738),
}

DATA_TABLES = {
    "life_expectancy": {
        "name": "Life expectancy at birth",
        "description": "Life expectancy in years for newborns, by country and year, "
                       "covering OECD members and the world.",
        "columns": CYV,
        "rows": [[c, y, v] for y in sorted(LIFE_EXPECTANCY)
                 for c, v in sorted(LIFE_EXPECTANCY[y].items())],
    },
    "hours_worked": {
        "name": "Average annual hours actually worked per worker",
        "description": "Total hours worked per year divided by the average number of "
                       "people in employment, by country and year.",
        "columns": CYV,
        "rows": [[c, y, v] for y in sorted(HOURS_WORKED)
                 for c, v in sorted(HOURS_WORKED[y].items())],
    },
    "health_coverage": {
        "name": "Population covered by health insurance",
        "description": "Share of the population with health coverage for a core set "
                       "of services, public and primary private, in percent.",
        "columns": CYV,
        "rows": [[c, y, v] for y in sorted(HEALTH_COVERAGE)
                 for c, v in sorted(HEALTH_COVERAGE[y].items())],
    },
    "population": {
        "name": "Total population",
        "description": "Resident population in millions of persons, by country and "
                       "year, for the largest countries of the world.",
        "columns": CYV,
        "rows": [[c, y, v] for y in sorted(POPULATION)
                 for c, v in sorted(POPULATION[y].items())],
    },
    "average_wages": {
        "name": "Average annual wages",
        "description": "Average wages per full-time equivalent employee, by country, "
                       "year, and unit of measure.",
        "columns": [{"name": "country", "kind": "text"},
                    {"name": "year", "kind": "date"},
                    {"name": "unit_of_measure", "kind": "text"},
                    {"name": "value", "kind": "numeric"},
                    {"name": "USD_value", "kind": "numeric"}],
        "rows": [[c, y, "National currency", native, usd]
                 for (c, y), (native, usd) in sorted(AVERAGE_WAGES.items())],
    },
}

CATALOG_ONLY_TABLES = {
    "japan_tourism": {
        "name": "International tourists arriving in Japan",
        "description": "Annual number of international tourists visiting Japan, in "
                       "millions of arrivals.",
        "columns": [{"name": "year", "kind": "date"},
                    {"name": "value", "kind": "numeric"}],
    },
    "gdp_growth": {
        "name": "Gross domestic product growth",
        "description": "Annual GDP growth rate in percent for the world's major "
                       "economies, including China and the United States.",
        "columns": CYV,
    },
    "unemployment_rate": {
        "name": "Harmonised unemployment rate",
        "description": "Monthly unemployment rate as a percent of the labour force, "
                       "seasonally adjusted, for France, Germany, and other countries.",
        "columns": CYV,
    },
    "education_spending": {
        "name": "Public spending on education",
        "description": "General government expenditure on education as a percent of "
                       "gross domestic product.",
        "columns": CYV,
    },
    "carbon_emissions": {
        "name": "Carbon dioxide emissions from fuel combustion",
        "description": "Annual carbon emissions in millions of tonnes, including "
                       "China, India, and the United States.",
        "columns": CYV,
    },
    "alcohol_consumption": {
        "name": "Alcohol consumption per capita",
        "description": "Litres of pure alcohol consumed per person aged fifteen and "
                       "over, by country and year.",
        "columns": CYV,
    },
    "housing_prices": {
        "name": "Analytical house prices indicators",
        "description": "Real and nominal housing prices indices across the world, "
                       "seasonally adjusted.",
        "columns": CYV,
    },
}


# --- gold claims ------------------------------------------------------------

VOTE_GOLD = [
    ("v1", "Marco Rubio voted against the bipartisan Violence Against Women Act.",
     "True", ["s1925-112"]),
    ("v2", "Chuck Grassley voted to slash Medicare when voting against the debt "
     "ceiling bill.", "Mostly False", ["s610-117", "s1301-117", "hr1868-117"]),
    ("v3", "Bernie Sanders voted for the Iraq war.", "False", ["hjres114-107"]),
    ("v4", "Ted Cruz voted against disaster relief for hurricane victims.",
     "Mostly True", ["hr152-113"]),
    ("v5", "Joe Biden voted for the Patriot Act.", "True", ["hr3162-107"]),
    ("v6", "Chuck Schumer voted against the tax cuts.", "True", ["hr1-115"]),
    ("v7", "Dick Durbin voted for the Affordable Care Act.", "True", ["hr3590-111"]),
    ("v8", "Bob Menendez voted against the border wall funding bill.",
     "Mostly True", ["s2511-115"]),
    ("v9", "Tom Udall voted for the clean energy bill.", "Half-True", ["s1733-111"]),
    ("v10", "Marco Rubio voted against raising the minimum wage.", "True", ["s460-113"]),
    ("v11", "Elizabeth Warren voted against the bank deregulation bill.",
     "True", ["s2155-115"]),
    ("v12", "Mitt Romney voted for the bipartisan infrastructure bill.",
     "True", ["hr3684-117"]),
    ("v13", "John Kennedy voted against expanding background checks for gun purchases.",
     "Mostly True", ["hr8-116"]),
    ("v14", "Bernie Sanders voted against the bailout of the big banks.",
     "True", ["hr1424-110"]),
    ("v15", "Ron DeSantis voted to cut food stamps.", "Mostly True", ["hr2642-113"]),
    ("v16", "Hillary Clinton voted for the bankruptcy bill.", "Half-True", ["s256-109"]),
    ("v17", "Chuck Grassley voted against lowering prescription drug prices.",
     "Mostly False", ["s2543-116"]),
    ("v18", "Marco Rubio voted against the January 6 commission.", "True", ["hr3233-117"]),
    ("v19", "Thomas Stewart Udall voted for net neutrality.", "Mostly True", ["sjres52-115"]),
    ("v20", "Liz Warren voted against the defense budget.", "Half-True", ["hr6395-116"]),
]

OECD_GOLD = [
    ("oc1", "Japan has the 2nd highest life expectancy in the world.",
     "Mostly True", ["life_expectancy"]),
    ("oc2", "In 2014, Americans worked more hours than Germans.", "True", ["hours_worked"]),
    ("oc3", "We are the only industrialized country without universal health coverage.",
     "Mostly True", ["health_coverage"]),
    ("oc4", "Congress cut education spending by 10 percent.", "Half-True",
     ["education_spending"]),
    ("oc5", "China doubled its carbon emissions since 2005.", "Mostly True",
     ["carbon_emissions"]),
    ("oc6", "Norway has the highest average wages in the OECD.", "Half-True",
     ["average_wages"]),
    ("oc7", "We have a lower unemployment rate than France.", "True",
     ["unemployment_rate"]),
    ("oc8", "America has the highest housing prices in the world.", "Mostly False",
     ["housing_prices"]),
    ("oc9", "Americans drink less alcohol than the French.", "True",
     ["alcohol_consumption"]),
    ("oc10", "China has the highest GDP growth among major economies.", "Mostly True",
     ["gdp_growth"]),
    ("oc11", "Japan gets twice as many tourists as France.", "Half-True",
     ["japan_tourism"]),
    ("oc12", "America has the 3rd largest population in the world.", "True",
     ["population"]),
    ("oc13", "Every family can afford basic health coverage.", "Mostly False",
     ["health_coverage"]),
    ("oc14", "Americans consume less alcohol compared to 1990.", "True",
     ["alcohol_consumption"]),
    ("oc15", "Americans work more hours than anyone in the rich world.", "Mostly True",
     ["hours_worked"]),
]


def _span_of(text: str, surface: str) -> Span:
    idx = text.find(surface)
    if idx < 0:
        raise ValueError(f"{surface!r} not in {text!r}")
    return Span(idx, idx + len(surface))


def _frame(text: str, name: str, target: str, elements: dict[str, str]) -> FrameInstance:
    return FrameInstance(
        frame_name=name,
        target=_span_of(text, target),
        elements={
            fe: FrameElement(span=_span_of(text, surface), text=surface)
            for fe, surface in elements.items()
        },
    )


def fsp_gold_records() -> list[GoldRecord]:
    t1 = "Marco Rubio voted against the Violence Against Women Act."
    t2 = "Japan has the highest life expectancy in the world."
    t3 = "America has a lower unemployment rate than France."
    t4 = "Wages grew since 2013."
    return [
        GoldRecord(
            claim=Claim(id="f1", text=t1),
            gold_verdict=parse_verdict_label("True"),
            gold_bill_ids=("s1925-112",),
            gold_frames=(
                _frame(t1, "Vote", "voted",
                       {"Agent": "Marco Rubio", "Position": "against",
                        "Issue": "the Violence Against Women Act"}),
            ),
        ),
        GoldRecord(
            claim=Claim(id="f2", text=t2),
            gold_verdict=parse_verdict_label("Mostly True"),
            gold_table_ids=("life_expectancy",),
            gold_frames=(
                _frame(t2, "Occupy_rank_via_superlatives", "highest",
                       {"Item": "Japan", "Rank": "highest",
                        "Dimension": "life expectancy"}),
            ),
        ),
        GoldRecord(
            # the annotated criterion keeps the determiner; parsers that trim it
            # match on the frame but miss on the argument
            claim=Claim(id="f3", text=t3),
            gold_verdict=parse_verdict_label("True"),
            gold_table_ids=("unemployment_rate",),
            gold_frames=(
                _frame(t3, "Comparing_two_entities", "lower",
                       {"Entity_1": "America",
                        "Comparison_criterion": "a lower unemployment rate",
                        "Entity_2": "France"}),
            ),
        ),
        GoldRecord(
            # annotated with the scale-change frame only
            claim=Claim(id="f4", text=t4),
            gold_verdict=parse_verdict_label("True"),
            gold_table_ids=("average_wages",),
            gold_frames=(
                _frame(t4, "Cause_change_of_position_on_a_scale", "grew",
                       {"Item": "Wages"}),
            ),
        ),
    ]


SURVEY_CLAIMS = [
    ("s1", "Marco Rubio voted against the bipartisan Violence Against Women Act."),
    ("s2", "Japan has the 2nd highest life expectancy in the world."),
    ("s3", "Chuck Grassley voted to slash Medicare when voting against the debt "
     "ceiling bill."),
    ("s4", "The sky over the bay was beautiful last night."),
    ("s5", "Americans work more hours than Germans."),
    ("s6", "Congress cut education spending by 10 percent."),
    ("s7", "Every family can afford basic health coverage."),
    ("s8", "Our taxes went up again this year."),
]

VERIFY_CASES = [
    {"id": "c1", "gold": "True", "predicted": "True", "evidence_available": True},
    {"id": "c2", "gold": "False", "predicted": "False", "evidence_available": True},
    {"id": "c3", "gold": "Pants on Fire", "predicted": "False", "evidence_available": True},
    {"id": "c4", "gold": "Mostly True", "predicted": "Mostly True", "evidence_available": True},
    {"id": "c5", "gold": "Half-True", "predicted": "True", "evidence_available": True},
    {"id": "c6", "gold": "Mostly False", "predicted": "Half-True", "evidence_available": True},
    {"id": "c7", "gold": "True", "predicted": "Mostly True", "evidence_available": True},
    {"id": "c8", "gold": "False", "predicted": "Mostly False", "evidence_available": True},
    {"id": "c9", "gold": "True", "predicted": "False", "evidence_available": False},
    {"id": "c10", "gold": "False", "predicted": "Irrelevant", "evidence_available": True},
]

BM25_DOCS = [
    {"id": "b1", "text": "life expectancy by country"},
    {"id": "b2", "text": "average annual hours worked"},
    {"id": "b3", "text": "life expectancy at birth by gender and country"},
]


def emit_congress(dirname: str, members, bills, rollcalls, votes) -> None:
    base = FIX / dirname
    write_jsonl(base / "members.jsonl", members)
    write_jsonl(base / "bills.jsonl",
                [{"bill_id": b, "title": t, "summary": s} for b, t, s in bills])
    write_jsonl(base / "rollcalls.jsonl",
                [{"rollcall_id": r, "bill_id": b, "date": d, "question": q}
                 for r, b, d, q in rollcalls])
    write_jsonl(base / "votes.jsonl",
                [{"bioguide_id": m, "rollcall_id": r, "position": p}
                 for m, r, p in votes])


def emit_oecd() -> None:
    base = FIX / "oecd"
    base.mkdir(parents=True, exist_ok=True)
    for table_id, spec in sorted(DATA_TABLES.items()):
        write_json(base / f"{table_id}.json",
                   {"table_id": table_id, "name": spec["name"],
                    "description": spec["description"], "columns": spec["columns"]})
        write_csv(base / f"{table_id}.csv",
                  [c["name"] for c in spec["columns"]], spec["rows"])
    for table_id, spec in sorted(CATALOG_ONLY_TABLES.items()):
        write_json(base / f"{table_id}.json",
                   {"table_id": table_id, "name": spec["name"],
                    "description": spec["description"], "columns": spec["columns"]})


def main() -> None:
    emit_congress("congress", MEMBERS, ALL_BILLS, ROLLCALLS, VOTES)
    emit_congress("congress_small", SMALL_MEMBERS, SMALL_BILLS,
                  SMALL_ROLLCALLS, SMALL_VOTES)
    write_json(FIX / "agents" / "cases.json", AGENT_CASES)
    emit_oecd()

    write_gold_records(
        FIX / "gold" / "vote_gold.jsonl",
        [GoldRecord(claim=Claim(id=cid, text=text),
                    gold_verdict=parse_verdict_label(label),
                    gold_bill_ids=tuple(bills))
         for cid, text, label, bills in VOTE_GOLD],
    )
    write_gold_records(
        FIX / "gold" / "oecd_gold.jsonl",
        [GoldRecord(claim=Claim(id=cid, text=text),
                    gold_verdict=parse_verdict_label(label),
                    gold_table_ids=tuple(tables))
         for cid, text, label, tables in OECD_GOLD],
    )
    write_gold_records(FIX / "gold" / "fsp_gold.jsonl", fsp_gold_records())
    write_json(FIX / "gold" / "verify_cases.json", VERIFY_CASES)
    write_jsonl(FIX / "claims" / "survey_claims.jsonl",
                [claim_to_dict(Claim(id=cid, text=text)) for cid, text in SURVEY_CLAIMS])
    write_json(FIX / "bm25" / "corpus.json",
               {"docs": BM25_DOCS, "query": "life expectancy"})

    n_bills = len(ALL_BILLS)
    print(f"congress: {len(MEMBERS)} members, {n_bills} bills, "
          f"{len(ROLLCALLS)} rollcalls, {len(VOTES)} votes")
    print(f"congress_small: {len(SMALL_MEMBERS)} members, {len(SMALL_BILLS)} bills, "
          f"{len(SMALL_ROLLCALLS)} rollcalls, {len(SMALL_VOTES)} votes")
    print(f"agents: {len(AGENT_CASES)} cases")
    print(f"oecd: {len(DATA_TABLES)} data tables, {len(CATALOG_ONLY_TABLES)} catalog-only")
    print(f"gold: {len(VOTE_GOLD)} vote, {len(OECD_GOLD)} table, "
          f"{len(fsp_gold_records())} parse, {len(VERIFY_CASES)} verify cases")


if __name__ == "__main__":
    main()
