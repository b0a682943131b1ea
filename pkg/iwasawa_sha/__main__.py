from iwasawa_sha.main import app

app(prog_name="iwasawa-sha")
