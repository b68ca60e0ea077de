"""Source data for the replay fixture set: sentences, gold facts, recorded completions."""

SAMPLES = [
    {
        "id": "r10-01",
        "text": "Angela Merkel studied physics at Leipzig University from 1973 to 1978.",
        "facts": [
            ("Angela Merkel", "educated at", "Leipzig University",
             [("academic major", "physics"), ("start time", "1973"), ("end time", "1978")]),
        ],
        "runs": [
            "(Angela Merkel | educated at | Leipzig University) [academic major: physics; start time: 1973; end time: 1978]",
            "(Angela Merkel | educated at | Leipzig University) [start time: 1973; end time: 1978]\n"
            "(Angela Merkel | field of work | physics)",
        ],
    },
    {
        "id": "r10-02",
        "text": "Conrad IV of Germany was King of the Romans and often held court in Palermo, "
                "the capital of the Kingdom of Sicily.",
        "facts": [
            ("Palermo", "capital of", "Kingdom of Sicily", []),
            ("Conrad IV of Germany", "position held", "King of the Romans", []),
        ],
        "runs": [
            "(Conrad IV of Germany | position held | King of the Romans)\n"
            "(Palermo | capital of | Conrad IV of Germany) [position: King of the Romans]\n"
            "(Palermo | capital of | Kingdom of Sicily)\n"
            "(Kingdom of Sicily | capital | Germany)",
            "(Conrad IV of Germany | position held | King of the Romans)\n"
            "(Palermo | capital of | Kingdom of Sicily)",
        ],
    },
    {
        "id": "r10-03",
        "text": "Lionel Messi played for FC Barcelona from 2004 to 2021 before joining Paris Saint-Germain.",
        "facts": [
            ("Lionel Messi", "member of sports team", "FC Barcelona", [("start time", "2004"), ("end time", "2021")]),
            ("Lionel Messi", "member of sports team", "Paris Saint-Germain", []),
        ],
        "runs": [
            "Here are the extracted facts:\n"
            "1. (Lionel Messi | member of sports team | FC Barcelona) [start time: 2004; end time: 2021]\n"
            "2. (Lionel Messi | member of sports team | Paris Saint-Germain) [start time: 2021]",
            "(Lionel Messi | member of sports team | FC Barcelona) [start time: 2004; end time: 2021]\n"
            "(Lionel Messi | member of sports team | Paris Saint-Germain) [start time: 2021]",
        ],
    },
    {
        "id": "r10-04",
        "text": "Marie Curie received the Nobel Prize in Physics in 1903 together with Pierre Curie and Henri Becquerel.",
        "facts": [
            ("Marie Curie", "award received", "Nobel Prize in Physics",
             [("point in time", "1903"), ("together with", "Pierre Curie"), ("together with", "Henri Becquerel")]),
        ],
        "runs": [
            "(Marie Curie | award received | Nobel Prize in Physics) [point in time: 1903; together with: Pierre Curie; together with: Henri Becquerel]",
            "(Marie Curie | award received | Nobel Prize in Physics) [point in time: 1903; together with: Pierre Curie; together with: Henri Becquerel]",
        ],
    },
    {
        "id": "r10-05",
        "text": "Helsinki is the capital of Finland and lies on the shore of the Gulf of Finland.",
        "facts": [
            ("Helsinki", "capital of", "Finland", []),
            ("Finland", "capital", "Helsinki", []),
        ],
        "runs": [
            "(Helsinki | capital of | Finland)\n(Finland | capital | Helsinki)\n(Helsinki | located next to | Gulf of Finland)",
            "(Helsinki | capital of | Finland)\n(Helsinki | location | Gulf of Finland)",
        ],
    },
    {
        "id": "r10-06",
        "text": "Tom Hanks played Forrest Gump in the 1994 film Forrest Gump.",
        "facts": [
            ("Forrest Gump", "cast member", "Tom Hanks", [("character role", "Forrest Gump")]),
        ],
        "runs": [
            "(Forrest Gump | cast member | Tom Hanks) [character role: Forrest Gump; point in time: 1994]",
            "(Tom Hanks | notable work | Forrest Gump) [point in time: 1994]\n"
            "(Forrest Gump | cast member | Tom Hanks) [character role: Forrest Gump]",
        ],
    },
    {
        "id": "r10-07",
        "text": "Nokia is headquartered in Espoo, Finland.",
        "facts": [
            ("Nokia", "headquarters location", "Espoo", []),
            ("Espoo", "country", "Finland", []),
        ],
        "runs": [
            "(Nokia | headquarters location | Espoo) [country: Finland]",
            "(Nokia | headquarters location | Espoo) [country: Finland]",
        ],
    },
    {
        "id": "r10-08",
        "text": "Jacinda Ardern served as Prime Minister of New Zealand from 2017 to 2023 "
                "as a member of the Labour Party.",
        "facts": [
            ("Jacinda Ardern", "position held", "Prime Minister of New Zealand",
             [("start time", "2017"), ("end time", "2023")]),
            ("Jacinda Ardern", "member of political party", "Labour Party", []),
        ],
        "runs": [
            "(Jacinda Ardern | position held | Prime Minister of New Zealand) [start time: 2017; end time: 2023; member of political party: Labour Party]",
            "(Jacinda Ardern | position held | Prime Minister of New Zealand) [start time: 2017; end time: 2023]\n"
            "(Jacinda Ardern | member of political party | Labour Party)",
        ],
    },
    {
        "id": "r10-09",
        "text": "The 2014 FIFA World Cup was won by Germany, who beat Argentina in the final.",
        "facts": [
            ("2014 FIFA World Cup", "winner", "Germany", []),
            ("2014 FIFA World Cup", "participant", "Argentina", []),
        ],
        "runs": [
            "(2014 FIFA World Cup | winner | Germany)\n(2014 FIFA World Cup | participant | Argentina) [ranking: 2]\n"
            "(Germany | participant in | 2014 FIFA World Cup)",
            "(2014 FIFA World Cup | winner | Germany)\n(Germany | participant in | 2014 FIFA World Cup) [ranking: 1]",
        ],
    },
    {
        "id": "r10-10",
        "text": "Aalto University was founded in 2010 through the merger of three universities in Espoo.",
        "facts": [
            ("Aalto University", "located in the administrative territorial entity", "Espoo", []),
        ],
        "runs": [
            "(Aalto University | located in the administrative territorial entity | Espoo) [start time: 2010]",
            "(Aalto University | inception | 2010)\n(Aalto University | location | Espoo)",
        ],
    },
]
