from fastapi import Body, FastAPI, Query, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .cli import run_atiyah, run_drum_quadric, run_drum_segre, run_fan_check, run_fan_dual, run_fan_subdivide
from .config import configure_logging
from .errors import RooftopError
from .fan_store import parse_fan
from .report import error_envelope

configure_logging()

app = FastAPI(title="Rooftop flips")

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)


@app.exception_handler(RooftopError)
async def rooftop_error_handler(request: Request, exc: RooftopError):
    command = request.url.path.strip("/").replace("/", " ")
    envelope = error_envelope(command, dict(request.query_params), exc)
    return JSONResponse(envelope.to_dict(), status_code=400)


@app.get("/")
def root():
    return {"message": "Rooftop flip API is running."}


@app.get("/atiyah")
def atiyah(m: int = Query(...), l: int = Query(...)):
    return run_atiyah(m, l).to_dict()


@app.get("/drum/segre")
def drum_segre(m: int = Query(...), l: int = Query(...)):
    return run_drum_segre(m, l).to_dict()


@app.get("/drum/quadric")
def drum_quadric(n: int = Query(...), samples: int = Query(None), seed: int = Query(None)):
    return run_drum_quadric(n, samples, seed).to_dict()


@app.post("/fan/check")
def fan_check(fan: dict = Body(...)):
    return run_fan_check(parse_fan(fan)).to_dict()


@app.post("/fan/dual")
def fan_dual(fan: dict = Body(...)):
    return run_fan_dual(parse_fan(fan)).to_dict()


@app.post("/fan/subdivide")
def fan_subdivide(ray: str = Query(...), fan: dict = Body(...)):
    return run_fan_subdivide(parse_fan(fan), ray).to_dict()
