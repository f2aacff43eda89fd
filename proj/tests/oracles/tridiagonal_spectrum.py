# scipy reference: Neumann spectral gap with midpoint edge weights.
import numpy as np, scipy.sparse as sp, scipy.sparse.linalg as sla
from scipy.linalg import eigh_tridiagonal
def cp(f,t,R,n):
    x=np.linspace(-R,R,n); h=x[1]-x[0]
    xm=(x[:-1]+x[1:])/2
    lw=-f(x)/t; lm=-f(xm)/t; s=lw.max(); lw-=s; lm-=s
    # generalized: S h = lam W h ; W=diag(e^lw), S edge weights e^lm/h^2
    # symmetrize: A = W^-1/2 S W^-1/2
    em=np.exp(lm - 0.5*(lw[:-1]+lw[1:]))   # edge weight / sqrt(w_i w_{i+1})
    d=np.zeros(n); d[:-1]+=np.exp(lm-lw[:-1]); d[1:]+=np.exp(lm-lw[1:])
    ev=eigh_tridiagonal(d/h**2,-em/h**2,select='i',select_range=(0,2),eigvals_only=True)
    return 1/ev[1]
sq=lambda x: x*x+np.sin(x)**2
for t in [0.2,0.1,0.05,0.02,0.01]:
    R=max(6*np.sqrt(0.93*t)*5,4)
    for res in [400,800]:
        n=int(round(2*R*res))+1
        print(t,res,cp(sq,t,R,n)/t)
for a in [0.5,1,2]:
  for t in [1,0.1]:
    R=max(6*np.sqrt(t/a)*5,4); n=int(round(2*R*200))+1
    print("quad",a,t,cp(lambda x:a*x*x/2,t,R,n)/(t/a))
