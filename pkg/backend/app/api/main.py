from fastapi import APIRouter

from app.api.routes import frontier, games, realize, utils

api_router = APIRouter()
api_router.include_router(utils.router)
api_router.include_router(games.router)
api_router.include_router(frontier.router)
api_router.include_router(realize.router)
